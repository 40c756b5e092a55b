use super::table::{ResultTable, Value};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Plot kinds understood by [`emit_plot_data`].
pub const PLOT_KINDS: [&str; 3] = ["fig5", "fig6", "drag"];

/// Reshapes a result table into columns ready for plotting. Rows come out in
/// a fixed order, so the same table always produces the same bytes.
///
/// - `fig6`: determinant phase against depth, one series per over-rotation.
/// - `fig5`: SNR against `ζ/θ`, one column per protocol, one block per `θ`.
/// - `drag`: leakage against anharmonicity for plain and DRAG pulses.
pub fn emit_plot_data(table: &ResultTable, kind: &str) -> Result<ResultTable> {
    let mut out = match kind {
        "fig6" => fig6(table)?,
        "fig5" => fig5(table)?,
        "drag" => drag(table)?,
        other => return Err(Error::UnknownKind(other.to_string())),
    };
    for (k, v) in &table.metadata {
        out.set_meta(k, v.as_str());
    }
    out.set_meta("plot", kind);
    Ok(out)
}

fn numbers(table: &ResultTable, name: &str) -> Result<Vec<f64>> {
    table
        .column(name)?
        .values
        .iter()
        .map(|v| {
            v.as_f64().ok_or_else(|| {
                Error::InsufficientData(format!("non-numeric `{}` in column `{name}`", v.as_text()))
            })
        })
        .collect()
}

fn texts(table: &ResultTable, name: &str) -> Result<Vec<String>> {
    Ok(table
        .column(name)?
        .values
        .iter()
        .map(Value::as_text)
        .collect())
}

type OrderedKey = (bool, i64);

/// `theta`, `zeta_ratio` and the SNR of each protocol at one grid point.
type SnrPoint<'a> = (f64, f64, BTreeMap<&'a str, f64>);

/// Total order on floats for grouping keys; NaN sorts last.
fn ordered(x: f64) -> OrderedKey {
    let bits = x.to_bits() as i64;
    (x.is_nan(), if bits < 0 { bits ^ i64::MAX } else { bits })
}

fn fig6(table: &ResultTable) -> Result<ResultTable> {
    let f = numbers(table, "over_rotation")?;
    let realization = numbers(table, "realization")?;
    let depth = numbers(table, "depth")?;
    let arg = numbers(table, "arg_det")?;
    let cont = numbers(table, "arg_det_continuous")?;
    let mut rows: Vec<usize> = (0..f.len()).collect();
    rows.sort_by_key(|&i| (ordered(f[i]), ordered(realization[i]), ordered(depth[i])));
    let mut out = ResultTable::new(&["series", "n", "arg_det", "arg_det_continuous"]);
    for i in rows {
        out.push_row(vec![
            format!("over_rotation={}/realization={}", f[i], realization[i]).into(),
            (depth[i] as usize).into(),
            arg[i].into(),
            cont[i].into(),
        ]);
    }
    Ok(out)
}

fn fig5(table: &ResultTable) -> Result<ResultTable> {
    let protocol = texts(table, "protocol")?;
    let theta = numbers(table, "theta")?;
    let ratio = numbers(table, "zeta_ratio")?;
    let snr = numbers(table, "snr")?;
    let mut protocols: Vec<&str> = protocol.iter().map(String::as_str).collect();
    protocols.sort_unstable();
    protocols.dedup();
    let mut grid: BTreeMap<(OrderedKey, OrderedKey), SnrPoint> = BTreeMap::new();
    for i in 0..theta.len() {
        grid.entry((ordered(theta[i]), ordered(ratio[i])))
            .or_insert_with(|| (theta[i], ratio[i], BTreeMap::new()))
            .2
            .insert(protocol[i].as_str(), snr[i]);
    }
    let mut header = vec!["theta", "zeta_ratio"];
    let names: Vec<String> = protocols.iter().map(|p| format!("snr_{p}")).collect();
    header.extend(names.iter().map(String::as_str));
    let mut out = ResultTable::new(&header);
    for (theta, ratio, by_protocol) in grid.values() {
        let mut row: Vec<Value> = vec![(*theta).into(), (*ratio).into()];
        row.extend(
            protocols
                .iter()
                .map(|p| by_protocol.get(p).copied().unwrap_or(f64::NAN).into()),
        );
        out.push_row(row);
    }
    Ok(out)
}

fn drag(table: &ResultTable) -> Result<ResultTable> {
    let eta = numbers(table, "eta")?;
    let cols = [
        "plain_from_zero",
        "plain_from_one",
        "drag_from_zero",
        "drag_from_one",
    ];
    let values: Vec<Vec<f64>> = cols
        .iter()
        .map(|c| numbers(table, c))
        .collect::<Result<_>>()?;
    let mut rows: Vec<usize> = (0..eta.len()).collect();
    rows.sort_by_key(|&i| ordered(eta[i]));
    let mut out = ResultTable::new(&[
        "log10_eta",
        "log10_plain_from_zero",
        "log10_plain_from_one",
        "log10_drag_from_zero",
        "log10_drag_from_one",
    ]);
    for i in rows {
        let mut row: Vec<Value> = vec![eta[i].log10().into()];
        row.extend(values.iter().map(|v| v[i].log10().into()));
        out.push_row(row);
    }
    Ok(out)
}

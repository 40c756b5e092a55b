use super::config::*;
use super::table::{ResultTable, TOOL_VERSION};
use crate::circuits::{
    run_cphase_family, run_crosstalk_family, run_floquet_family, run_relative_axis_family,
    run_single_qubit_family, run_swap_family, DdSequence, DepthRecord, FamilyOptions, Prep,
    SwapAxis,
};
use crate::error::Result;
use crate::estimation::{
    determinant_phase_series, estimate_phi, estimate_single_qubit, estimate_theta_chi,
    estimate_z_phases, names, optimal_depth_from_scan, simulate_phase_estimates,
    simulate_swap_estimates, snr_scan, variance_bound, EstimationResult, Protocol, SwapBranch,
    SwapOptions, VarianceMode,
};
use crate::linalg::wrap_angle;
use crate::noise::{cell_rng, over_rotation_eps, CellKey, NoiseConfig};
use crate::pulses::{
    geometric_grid, integrate_three_level_with_steps, leakage_scan, power_law_exponent,
    PulseEnvelope,
};
use crate::robustness::{robustness_verdict, VerdictOptions};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Outcome of one declared expectation.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub expectation: Expectation,
    pub value: Option<f64>,
    pub passed: bool,
}

/// Everything a run produces: named tables, scalar metrics and checks.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// The config after seed propagation and overrides.
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub tables: Vec<(String, ResultTable)>,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<CheckOutcome>,
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn table(&self, name: &str) -> Option<&ResultTable> {
        self.tables.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    /// Metrics and expectation verdicts as a table.
    pub fn summary(&self) -> ResultTable {
        let mut t = ResultTable::new(&["metric", "value", "expected", "status"]);
        for (metric, value) in &self.metrics {
            let checks: Vec<&CheckOutcome> = self
                .checks
                .iter()
                .filter(|c| &c.expectation.metric == metric)
                .collect();
            if checks.is_empty() {
                t.push_row(vec![
                    metric.as_str().into(),
                    (*value).into(),
                    "".into(),
                    "".into(),
                ]);
            }
            for c in checks {
                t.push_row(vec![
                    metric.as_str().into(),
                    (*value).into(),
                    c.expectation.describe().into(),
                    status(c.passed).into(),
                ]);
            }
        }
        for c in self.checks.iter().filter(|c| c.value.is_none()) {
            t.push_row(vec![
                c.expectation.metric.as_str().into(),
                "missing".into(),
                c.expectation.describe().into(),
                status(false).into(),
            ]);
        }
        self.stamp(&mut t, "summary");
        t
    }

    fn stamp(&self, table: &mut ResultTable, name: &str) {
        table.set_meta("tool", "meadd");
        table.set_meta("version", TOOL_VERSION);
        table.set_meta("config_hash", self.config_hash.as_str());
        table.set_meta("seed", self.config.seed.to_string());
        table.set_meta("experiment", self.config.experiment.kind());
        table.set_meta("name", self.config.name.as_str());
        table.set_meta("table", name);
    }

    /// Writes `<name>_<table>.csv` for every table plus `<name>_summary.csv`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        for (name, table) in &self.tables {
            let path = dir.join(format!("{}_{name}.csv", self.config.name));
            warn_on_hash_change(&path, &self.config_hash);
            table.write(&path)?;
            written.push(path);
        }
        let path = dir.join(format!("{}_summary.csv", self.config.name));
        warn_on_hash_change(&path, &self.config_hash);
        self.summary().write(&path)?;
        written.push(path);
        Ok(written)
    }
}

fn status(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Flags a rerun that replaces a table made from a different config.
fn warn_on_hash_change(path: &Path, hash: &str) {
    if let Ok(old) = ResultTable::read(path) {
        if let Some(previous) = old.meta("config_hash") {
            if previous != hash {
                eprintln!(
                    "warning: {} was produced by config {previous}; replacing with {hash}",
                    path.display()
                );
            }
        }
    }
}

struct Collected {
    tables: Vec<(String, ResultTable)>,
    metrics: BTreeMap<String, f64>,
}

/// Runs one experiment. Cells run in parallel on the current rayon pool and
/// are merged in grid order, so the output does not depend on thread count.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    run_with(config, &Overrides::default())
}

pub fn run_with(config: &ExperimentConfig, overrides: &Overrides) -> Result<RunOutput> {
    let mut config = config.clone();
    config.apply(overrides);
    config.validate()?;
    let collected = match &config.experiment {
        Experiment::Cphase(s) => cphase(s)?,
        Experiment::Swap(s) => swap(s)?,
        Experiment::Floquet(s) => floquet(s)?,
        Experiment::SingleQubit(s) => single_qubit(s)?,
        Experiment::RelativeAxis(s) => relative_axis(s)?,
        Experiment::Crosstalk(s) => crosstalk(s)?,
        Experiment::SnrScan(s) => snr(s)?,
        Experiment::Robustness(s) => robustness(s)?,
        Experiment::Drag(s) => drag(s)?,
        Experiment::VarianceBound(s) => variance(&config, s)?,
    };
    let checks = config
        .expect
        .iter()
        .map(|e| {
            let value = collected.metrics.get(&e.metric).copied();
            CheckOutcome {
                expectation: e.clone(),
                value,
                passed: value.is_some_and(|v| e.holds(v)),
            }
        })
        .collect();
    let mut out = RunOutput {
        config_hash: config.hash(),
        config,
        tables: Vec::new(),
        metrics: collected.metrics,
        checks,
    };
    for (name, mut table) in collected.tables {
        out.stamp(&mut table, &name);
        out.tables.push((name, table));
    }
    Ok(out)
}

fn err_abs(estimate: &EstimationResult, name: &str, truth: f64) -> f64 {
    estimate
        .get(name)
        .map_or(f64::NAN, |v| wrap_angle(v - truth).abs())
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NAN, f64::max)
}

/// Minimal-jump continuation of a wrapped phase sequence, for plotting.
fn continuous(angles: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(angles.len());
    for &a in angles {
        match out.last() {
            Some(&prev) => out.push(prev + wrap_angle(a - prev)),
            None => out.push(a),
        }
    }
    out
}

fn key(tag: &str, x: f64) -> String {
    format!("{tag}@{x}")
}

/// Determinant phases, `|det|` per depth, and the fit of one cell.
type CphaseCell = (Vec<(usize, f64)>, Vec<f64>, EstimationResult);

fn cphase(s: &CphaseSpec) -> Result<Collected> {
    let cells: Vec<(usize, usize)> = (0..s.over_rotations.len())
        .flat_map(|o| (0..s.realizations).map(move |r| (o, r)))
        .collect();
    let results: Vec<CphaseCell> = cells
        .par_iter()
        .map(|&(o, r)| {
            let eps = over_rotation_eps(s.over_rotations[o]);
            let noise = NoiseConfig {
                mw_error_left: eps,
                mw_error_right: if s.both_qubits { eps } else { [0.0; 3] },
                ..s.noise.clone()
            };
            let opts = FamilyOptions::with_dd(s.dd).realization(r as u64);
            let records = run_cphase_family(&s.gate, &noise, &s.depths, &opts)?;
            let series = determinant_phase_series(&records)?;
            let mags = records
                .iter()
                .map(|r| r.matrix().map_or(f64::NAN, |m| m.determinant().norm()))
                .collect();
            Ok((series, mags, estimate_phi(&records)?))
        })
        .collect::<Result<_>>()?;

    let mut records = ResultTable::new(&[
        "over_rotation",
        "realization",
        "depth",
        "arg_det",
        "arg_det_continuous",
        "det_abs",
    ]);
    let mut estimates = ResultTable::new(&[
        "over_rotation",
        "realization",
        "phi_hat",
        "phi_stderr",
        "phi_error",
        "residual_rms",
    ]);
    let mut metrics = BTreeMap::new();
    for (&(o, r), (series, mags, est)) in cells.iter().zip(&results) {
        let f = s.over_rotations[o];
        let angles: Vec<f64> = series.iter().map(|(_, a)| *a).collect();
        for (((depth, a), c), m) in series.iter().zip(continuous(&angles)).zip(mags) {
            records.push_row(vec![
                f.into(),
                r.into(),
                (*depth).into(),
                (*a).into(),
                c.into(),
                (*m).into(),
            ]);
        }
        let error = if s.dd == DdSequence::Xx {
            err_abs(est, names::PHI, s.gate.phi)
        } else {
            // The trace branch pick assumes the X⊗X cycle; other sequences
            // only fix φ modulo π through the slope.
            est.get(names::PHI).map_or(f64::NAN, |v| {
                (wrap_angle(2.0 * (v - s.gate.phi)) / 2.0).abs()
            })
        };
        estimates.push_row(vec![
            f.into(),
            r.into(),
            est.get(names::PHI).unwrap_or(f64::NAN).into(),
            est.std_error(names::PHI).unwrap_or(f64::NAN).into(),
            error.into(),
            est.fit_residual_rms.into(),
        ]);
        let e = metrics.entry(key("phi_error", f)).or_insert(f64::NAN);
        *e = f64::max(*e, error);
        let e = metrics.entry(key("residual_rms", f)).or_insert(f64::NAN);
        *e = f64::max(*e, est.fit_residual_rms);
    }
    Ok(Collected {
        tables: vec![("records".into(), records), ("estimates".into(), estimates)],
        metrics,
    })
}

fn bloch_rows(table: &mut ResultTable, realization: usize, axis: &str, records: &[DepthRecord]) {
    for rec in records {
        let b = rec
            .bloch(Prep::Zero1)
            .or_else(|| rec.bloch(Prep::One0))
            .unwrap_or([f64::NAN; 3]);
        table.push_row(vec![
            realization.into(),
            axis.into(),
            rec.depth.into(),
            b[0].into(),
            b[1].into(),
            b[2].into(),
        ]);
    }
}

type SwapCell = (Vec<DepthRecord>, Vec<DepthRecord>, EstimationResult);

fn swap_like<F>(realizations: usize, run_cell: F) -> Result<Vec<SwapCell>>
where
    F: Fn(usize) -> Result<SwapCell> + Sync,
{
    (0..realizations).into_par_iter().map(&run_cell).collect()
}

fn swap_tables(cells: &[SwapCell], theta: f64, chi: Option<f64>) -> Collected {
    let mut records = ResultTable::new(&[
        "realization",
        "axis",
        "depth",
        "bloch_x",
        "bloch_y",
        "bloch_z",
    ]);
    let mut estimates = ResultTable::new(&[
        "realization",
        "theta_hat",
        "theta_stderr",
        "chi_hat",
        "chi_indefinite",
    ]);
    let mut thetas = Vec::new();
    let mut chi_errors = Vec::new();
    for (r, (x, y, est)) in cells.iter().enumerate() {
        bloch_rows(&mut records, r, "x", x);
        bloch_rows(&mut records, r, "y", y);
        let t = est.get(names::THETA).unwrap_or(f64::NAN);
        thetas.push(t);
        if let Some(c) = chi {
            if !est.is_indefinite(names::CHI) {
                chi_errors.push(err_abs(est, names::CHI, c));
            }
        }
        estimates.push_row(vec![
            r.into(),
            t.into(),
            est.std_error(names::THETA).unwrap_or(f64::NAN).into(),
            est.get(names::CHI).unwrap_or(f64::NAN).into(),
            est.is_indefinite(names::CHI).into(),
        ]);
    }
    let (mean, std) = mean_std(&thetas);
    let mut metrics = BTreeMap::new();
    metrics.insert("theta_mean".into(), mean);
    metrics.insert("theta_std".into(), std);
    metrics.insert(
        "theta_error_max".into(),
        max_of(thetas.iter().map(|t| (t - theta).abs())),
    );
    if chi.is_some() {
        metrics.insert("chi_error_max".into(), max_of(chi_errors));
    }
    Collected {
        tables: vec![("records".into(), records), ("estimates".into(), estimates)],
        metrics,
    }
}

fn swap(s: &SwapSpec) -> Result<Collected> {
    let opts = SwapOptions {
        zeta_ref: s.zeta_ref,
        branch: if s.small_angle_branch {
            SwapBranch::SmallAngle
        } else {
            SwapBranch::Exact
        },
    };
    let cells = swap_like(s.realizations, |r| {
        let fam = FamilyOptions::default().realization(r as u64);
        let x = run_swap_family(&s.gate, &s.noise, &s.depths, SwapAxis::X, &fam)?;
        let y = run_swap_family(&s.gate, &s.noise, &s.depths, SwapAxis::Y, &fam)?;
        let est = estimate_theta_chi(&x, &y, &opts)?;
        Ok((x, y, est))
    })?;
    Ok(swap_tables(&cells, s.gate.theta, Some(s.gate.chi)))
}

fn crosstalk(s: &CrosstalkSpec) -> Result<Collected> {
    let opts = SwapOptions {
        zeta_ref: s.zeta,
        ..SwapOptions::default()
    };
    let cells = swap_like(s.realizations, |r| {
        let fam = FamilyOptions::default().realization(r as u64);
        let x = run_crosstalk_family(
            s.theta,
            s.chi,
            s.zeta,
            &s.noise,
            &s.depths,
            SwapAxis::X,
            &fam,
        )?;
        let y = run_crosstalk_family(
            s.theta,
            s.chi,
            s.zeta,
            &s.noise,
            &s.depths,
            SwapAxis::Y,
            &fam,
        )?;
        let est = estimate_theta_chi(&x, &y, &opts)?;
        Ok((x, y, est))
    })?;
    Ok(swap_tables(&cells, s.theta, None))
}

fn floquet(s: &FloquetSpec) -> Result<Collected> {
    let theta_hat = s.theta_hat.unwrap_or(s.gate.theta);
    let results: Vec<EstimationResult> = (0..s.realizations)
        .into_par_iter()
        .map(|r| {
            let fam = FamilyOptions::default().realization(r as u64);
            estimate_z_phases(
                &run_floquet_family(&s.gate, &s.noise, &s.depths, &fam)?,
                theta_hat,
            )
        })
        .collect::<Result<_>>()?;
    let mut table = ResultTable::new(&[
        "realization",
        "gamma_hat",
        "gamma_stderr",
        "zeta_hat",
        "zeta_stderr",
    ]);
    for (r, est) in results.iter().enumerate() {
        table.push_row(vec![
            r.into(),
            est.get(names::GAMMA).unwrap_or(f64::NAN).into(),
            est.std_error(names::GAMMA).unwrap_or(f64::NAN).into(),
            est.get(names::ZETA).unwrap_or(f64::NAN).into(),
            est.std_error(names::ZETA).unwrap_or(f64::NAN).into(),
        ]);
    }
    let canonical = s.gate.canonical();
    let mut metrics = BTreeMap::new();
    metrics.insert(
        "gamma_error_max".into(),
        max_of(
            results
                .iter()
                .map(|e| err_abs(e, names::GAMMA, canonical.gamma)),
        ),
    );
    metrics.insert(
        "zeta_error_max".into(),
        max_of(
            results
                .iter()
                .map(|e| err_abs(e, names::ZETA, canonical.zeta)),
        ),
    );
    Ok(Collected {
        tables: vec![("estimates".into(), table)],
        metrics,
    })
}

fn single_tables(results: &[EstimationResult], mu: Option<f64>, zeta: f64) -> Collected {
    let mut table = ResultTable::new(&[
        "realization",
        "mu_hat",
        "mu_stderr",
        "zeta_hat",
        "zeta_stderr",
    ]);
    for (r, est) in results.iter().enumerate() {
        table.push_row(vec![
            r.into(),
            est.get(names::MU).unwrap_or(f64::NAN).into(),
            est.std_error(names::MU).unwrap_or(f64::NAN).into(),
            est.get(names::ZETA).unwrap_or(f64::NAN).into(),
            est.std_error(names::ZETA).unwrap_or(f64::NAN).into(),
        ]);
    }
    let zetas: Vec<f64> = results
        .iter()
        .map(|e| e.get(names::ZETA).unwrap_or(f64::NAN))
        .collect();
    let (mean, std) = mean_std(&zetas);
    let mut metrics = BTreeMap::new();
    if let Some(mu) = mu {
        metrics.insert(
            "mu_error_max".into(),
            max_of(results.iter().map(|e| err_abs(e, names::MU, mu))),
        );
    }
    metrics.insert(
        "zeta_error_max".into(),
        max_of(results.iter().map(|e| err_abs(e, names::ZETA, zeta))),
    );
    metrics.insert("zeta_mean".into(), mean);
    metrics.insert("zeta_std".into(), std);
    Collected {
        tables: vec![("estimates".into(), table)],
        metrics,
    }
}

fn single_qubit(s: &SingleQubitSpec) -> Result<Collected> {
    let results: Vec<EstimationResult> = (0..s.realizations)
        .into_par_iter()
        .map(|r| {
            let records = run_single_qubit_family(
                &s.gate,
                s.reference.as_ref(),
                &s.noise,
                &s.depths,
                &s.z_offsets,
                r as u64,
            )?;
            estimate_single_qubit(&records)
        })
        .collect::<Result<_>>()?;
    Ok(single_tables(&results, Some(s.gate.mu), s.gate.zeta))
}

fn relative_axis(s: &RelativeAxisSpec) -> Result<Collected> {
    let results: Vec<EstimationResult> = (0..s.realizations)
        .into_par_iter()
        .map(|r| {
            let records = run_relative_axis_family(
                &s.x_pi,
                &s.x_half,
                &s.noise,
                &s.depths,
                &s.z_offsets,
                r as u64,
            )?;
            estimate_single_qubit(&records)
        })
        .collect::<Result<_>>()?;
    Ok(single_tables(&results, None, s.x_half.chi - s.x_pi.chi))
}

fn snr(s: &SnrScanSpec) -> Result<Collected> {
    let grid = s.grid();
    let mut table = ResultTable::new(&[
        "protocol",
        "theta",
        "zeta_ratio",
        "zeta",
        "snr",
        "mean",
        "std",
        "realizations",
        "budget",
    ]);
    let mut by_protocol: BTreeMap<&str, Vec<(f64, f64, f64)>> = BTreeMap::new();
    for &protocol in &s.protocols {
        let rows = snr_scan(protocol, &grid, &s.settings)?;
        for (row, ratio) in rows
            .iter()
            .zip(s.thetas.iter().flat_map(|_| s.zeta_ratios.iter()))
        {
            table.push_row(vec![
                protocol.name().into(),
                row.theta.into(),
                (*ratio).into(),
                row.zeta.into(),
                row.snr.into(),
                row.mean.into(),
                row.std.into(),
                row.realizations.into(),
                s.settings.budget(protocol).into(),
            ]);
            by_protocol
                .entry(protocol.name())
                .or_default()
                .push((row.theta, *ratio, row.snr));
        }
    }

    let mut metrics = BTreeMap::new();
    let lookup = |p: Protocol, theta: f64, ratio: f64| {
        by_protocol
            .get(p.name())
            .and_then(|v| v.iter().find(|(t, r, _)| *t == theta && *r == ratio))
            .map(|(_, _, snr)| *snr)
    };
    for &theta in &s.thetas {
        if let Some(rows) = by_protocol.get(Protocol::Meadd.name()) {
            let snrs: Vec<f64> = rows
                .iter()
                .filter(|(t, _, _)| *t == theta)
                .map(|(_, _, v)| *v)
                .collect();
            let hi = snrs.iter().cloned().fold(f64::NAN, f64::max);
            let lo = snrs.iter().cloned().fold(f64::NAN, f64::min);
            metrics.insert(key("meadd_flatness", theta), hi / lo);
        }
        if let (Some(at_zero), Some(at_ten)) = (
            lookup(Protocol::PhaseMethod, theta, 0.0),
            lookup(Protocol::PhaseMethod, theta, 10.0),
        ) {
            metrics.insert(key("phase_method_drop", theta), at_ten / at_zero);
        }
    }
    let mut advantage = f64::NAN;
    for &theta in &s.thetas {
        for &ratio in s.zeta_ratios.iter().filter(|r| **r >= 1.0) {
            if let (Some(m), Some(p)) = (
                lookup(Protocol::Meadd, theta, ratio),
                lookup(Protocol::PhaseMethod, theta, ratio),
            ) {
                advantage = f64::min(advantage, m / p);
            }
        }
    }
    if advantage.is_finite() {
        metrics.insert("meadd_over_phase_method_min".into(), advantage);
    }
    Ok(Collected {
        tables: vec![("snr".into(), table)],
        metrics,
    })
}

fn robustness(s: &RobustnessSpec) -> Result<Collected> {
    let mut table = ResultTable::new(&[
        "case",
        "gate",
        "dd",
        "alternating_idle",
        "robust",
        "min_cancel_cycles",
        "flipped",
        "sector_coupling",
        "eigenphases_symmetric",
        "eigenphases_antisymmetric",
    ]);
    let mut metrics = BTreeMap::new();
    let join = |xs: &[f64]| {
        xs.iter()
            .map(|x| format!("{x:.6}"))
            .collect::<Vec<_>>()
            .join(";")
    };
    for case in &s.cases {
        let gate = case.gate.resolve()?;
        let report = robustness_verdict(
            &gate,
            case.dd,
            VerdictOptions {
                alternating_idle: case.alternating_idle,
                include_symmetric_xy: case.include_symmetric_xy,
            },
        );
        let dd = serde_plain(&case.dd);
        let label = format!(
            "{}/{}{}",
            case.gate.label(),
            dd,
            if case.alternating_idle { "+idle" } else { "" }
        );
        let flipped: Vec<String> = report
            .flipped_degeneracies
            .iter()
            .map(|t| t.labels.join("|"))
            .collect();
        table.push_row(vec![
            label.as_str().into(),
            case.gate.label().into(),
            dd.as_str().into(),
            case.alternating_idle.into(),
            report.robust.into(),
            report
                .min_cancel_cycles
                .map_or(-1, |n| n as i64)
                .to_string()
                .into(),
            flipped.join(";").into(),
            report.spectrum.sector_coupling.into(),
            join(&report.spectrum.eigenphases_symmetric).into(),
            join(&report.spectrum.eigenphases_antisymmetric).into(),
        ]);
        metrics.insert(
            format!("robust@{label}"),
            if report.robust { 1.0 } else { 0.0 },
        );
        metrics.insert(
            format!("min_cancel@{label}"),
            report.min_cancel_cycles.map_or(f64::INFINITY, |n| n as f64),
        );
        metrics.insert(
            format!("flipped@{label}"),
            report.flipped_degeneracies.len() as f64,
        );
    }
    Ok(Collected {
        tables: vec![("verdicts".into(), table)],
        metrics,
    })
}

fn serde_plain<T: serde::Serialize>(value: &T) -> String {
    #[derive(serde::Serialize)]
    struct Wrap<'a, T> {
        v: &'a T,
    }
    toml::to_string(&Wrap { v: value })
        .ok()
        .and_then(|s| {
            s.split_once('=')
                .map(|(_, v)| v.trim().trim_matches('"').to_string())
        })
        .unwrap_or_default()
}

fn drag(s: &DragSpec) -> Result<Collected> {
    let etas = geometric_grid(s.eta_min, s.eta_max, s.points);
    let pulse = PulseEnvelope::new(s.amplitude);
    let scan = leakage_scan(&pulse, &etas, s.steps)?;
    let halving: Vec<f64> = etas
        .par_iter()
        .map(|&eta| {
            let a = integrate_three_level_with_steps(&pulse, eta, s.steps)?;
            let b = integrate_three_level_with_steps(&pulse, eta, 2 * s.steps)?;
            Ok(a.from_one
                .distance(&b.from_one)
                .max(a.from_zero.distance(&b.from_zero)))
        })
        .collect::<Result<_>>()?;
    let mut table = ResultTable::new(&[
        "eta",
        "plain_from_zero",
        "plain_from_one",
        "drag_from_zero",
        "drag_from_one",
        "suppression_ratio",
        "halving_change",
    ]);
    for (p, h) in scan.iter().zip(&halving) {
        table.push_row(vec![
            p.eta.into(),
            p.plain_from_zero.into(),
            p.plain_from_one.into(),
            p.drag_from_zero.into(),
            p.drag_from_one.into(),
            p.suppression_ratio().into(),
            (*h).into(),
        ]);
    }
    let zero: Vec<f64> = scan.iter().map(|p| p.plain_from_zero).collect();
    let one: Vec<f64> = scan.iter().map(|p| p.plain_from_one).collect();
    let mut metrics = BTreeMap::new();
    metrics.insert(
        "exponent_from_zero".into(),
        power_law_exponent(&etas, &zero)?,
    );
    metrics.insert("exponent_from_one".into(), power_law_exponent(&etas, &one)?);
    metrics.insert(
        "suppression_ratio_max".into(),
        max_of(scan.iter().map(|p| p.suppression_ratio())),
    );
    metrics.insert("halving_change_max".into(), max_of(halving));
    Ok(Collected {
        tables: vec![("leakage".into(), table)],
        metrics,
    })
}

/// Stream identifiers of the variance experiments.
const SINGLE_VARIANCE: u64 = 100;
const SWAP_VARIANCE: u64 = 101;

fn variance(config: &ExperimentConfig, s: &VarianceBoundSpec) -> Result<Collected> {
    let n_single = (1.0 / (s.lambda1 + s.lambda2)).round().max(1.0) as usize;
    let (single_var_bound, _) = variance_bound(
        VarianceMode::SingleQubitPhase,
        s.lambda1,
        s.lambda2,
        s.shots,
        n_single,
    )?;
    let single_bound = single_var_bound.sqrt();
    let stds: Vec<f64> = (0..s.repeats)
        .into_par_iter()
        .map(|r| {
            let mut rng = cell_rng(
                config.seed,
                CellKey::new(r as u64, SINGLE_VARIANCE, n_single as u64, 0),
            );
            let est = simulate_phase_estimates(
                s.phi, n_single, s.shots, s.lambda1, s.lambda2, s.trials, &mut rng,
            )?;
            Ok(mean_std(&est).1)
        })
        .collect::<Result<_>>()?;

    let variances: Vec<f64> = s
        .scan_depths
        .par_iter()
        .map(|&n| {
            let mut rng = cell_rng(config.seed, CellKey::new(0, SWAP_VARIANCE, n as u64, 0));
            let est = simulate_swap_estimates(
                s.theta,
                n,
                s.shots,
                s.lambda1,
                s.lambda2,
                s.scan_trials,
                &mut rng,
            )?;
            Ok(mean_std(&est).1.powi(2))
        })
        .collect::<Result<_>>()?;
    let n_two = 2.0 / (s.lambda1 + 4.0 * s.lambda2);
    let fitted = optimal_depth_from_scan(&s.scan_depths, &variances)?;

    let mut single = ResultTable::new(&["repeat", "depth", "std", "bound", "ratio"]);
    for (r, sd) in stds.iter().enumerate() {
        single.push_row(vec![
            r.into(),
            n_single.into(),
            (*sd).into(),
            single_bound.into(),
            (sd / single_bound).into(),
        ]);
    }
    let mut scan = ResultTable::new(&["depth", "variance", "bound"]);
    for (&n, v) in s.scan_depths.iter().zip(&variances) {
        let (bound, _) =
            variance_bound(VarianceMode::TwoQubitSwap, s.lambda1, s.lambda2, s.shots, n)?;
        scan.push_row(vec![n.into(), (*v).into(), bound.into()]);
    }
    let ratios: Vec<f64> = stds.iter().map(|sd| sd / single_bound).collect();
    let mut metrics = BTreeMap::new();
    metrics.insert("single_ratio_max".into(), max_of(ratios.iter().cloned()));
    metrics.insert(
        "single_ratio_min".into(),
        ratios.iter().cloned().fold(f64::NAN, f64::min),
    );
    metrics.insert("two_qubit_nstar".into(), n_two);
    metrics.insert("two_qubit_nstar_fitted".into(), fitted);
    metrics.insert("two_qubit_nstar_ratio".into(), fitted / n_two);
    Ok(Collected {
        tables: vec![("single".into(), single), ("scan".into(), scan)],
        metrics,
    })
}

use super::phase::{fit_linear_phase_demodulated, PhaseSeries};
use super::{log_decay_rate, names, EstimationResult};
use crate::circuits::DepthRecord;
use crate::error::{Error, Result};
use crate::linalg::{cis, wrap_angle, Mat2};
use std::f64::consts::PI;

/// Below this determinant magnitude the phase is treated as lost.
pub const DET_FLOOR: f64 = 1e-3;

pub(crate) fn sorted_matrices<F>(records: &[DepthRecord], matrix: F) -> Result<Vec<(usize, Mat2)>>
where
    F: Fn(&DepthRecord) -> Option<Mat2>,
{
    let mut out = Vec::with_capacity(records.len());
    for rec in records {
        let m = matrix(rec).ok_or_else(|| {
            Error::InsufficientData(format!(
                "record at depth {} lacks the coherence data",
                rec.depth
            ))
        })?;
        let det_abs = m.determinant().norm();
        if det_abs < DET_FLOOR {
            return Err(Error::DegenerateMatrix {
                depth: rec.depth,
                det_abs,
            });
        }
        out.push((rec.depth, m));
    }
    out.sort_by_key(|(d, _)| *d);
    Ok(out)
}

/// Controlled phase from the determinant of the decoupled-family matrices.
///
/// `det M_k = e^{ikφ}`, so the slope fixes `φ` modulo `π` (depths come in
/// steps of two). The remaining branch is picked from the trace at the
/// shallowest depth `k ≡ 2 (mod 4)`, where the two candidates differ by a sign.
pub fn estimate_phi(records: &[DepthRecord]) -> Result<EstimationResult> {
    let mats = sorted_matrices(records, DepthRecord::matrix)?;
    let depths: Vec<usize> = mats.iter().map(|(d, _)| *d).collect();
    let dets: Vec<_> = mats.iter().map(|(_, m)| m.determinant()).collect();
    let series = PhaseSeries::new(depths.clone(), dets.iter().map(|d| d.arg()).collect())?;
    let fit = fit_linear_phase_demodulated(&series)?;

    let reduced = wrap_angle(2.0 * fit.slope) / 2.0;
    let (k, m) = mats.iter().find(|(d, _)| d % 4 == 2).ok_or_else(|| {
        Error::InsufficientData("the controlled-phase branch needs a depth of 2 mod 4".into())
    })?;
    let score = |phi: f64| (m.trace() * cis(-(*k as f64) * phi / 2.0)).re;
    let phi = if score(reduced + PI) > score(reduced) {
        wrap_angle(reduced + PI)
    } else {
        wrap_angle(reduced)
    };

    let mut result = EstimationResult::default();
    result.set(names::PHI, phi, fit.slope_stderr);
    result.fit_residual_rms = fit.residual_rms;
    result.diagnostics.unwrap_margin = fit.unwrap_margin;
    let mags: Vec<f64> = dets.iter().map(|d| d.norm()).collect();
    result.diagnostics.contrast_decay_rate = log_decay_rate(&depths, &mags);
    Ok(result)
}

/// `arg(conj det M_k)` per depth, the series that winds as `−kφ`.
pub fn determinant_phase_series(records: &[DepthRecord]) -> Result<Vec<(usize, f64)>> {
    Ok(sorted_matrices(records, DepthRecord::matrix)?
        .into_iter()
        .map(|(d, m)| (d, m.determinant().conj().arg()))
        .collect())
}

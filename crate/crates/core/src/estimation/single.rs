use super::phase::{fit_linear_phase, PhaseSeries};
use super::{names, EstimationResult};
use crate::circuits::SingleQubitRecord;
use crate::error::{Error, Result};
use nalgebra::{Matrix2, Vector2};

/// Rotation angle `Ω(z)` of `Z(z)·R` for one z offset, from the winding of
/// the two-quadrature signal `e^{2inΩ}` against the reference cycle.
fn rabi_angle(records: &[&SingleQubitRecord]) -> Result<(f64, f64, f64, f64)> {
    let mut sorted: Vec<_> = records.to_vec();
    sorted.sort_by_key(|r| r.depth);
    let reference = sorted[0].reference_rabi;
    let depths: Vec<usize> = sorted.iter().map(|r| r.depth).collect();
    let angles = sorted.iter().map(|r| r.signal().arg()).collect();
    let series = PhaseSeries::new(depths, angles)?.demodulated(2.0 * reference);
    let fit = fit_linear_phase(&series)?;
    Ok((
        reference + fit.slope / 2.0,
        fit.slope_stderr / 2.0,
        fit.residual_rms,
        fit.unwrap_margin,
    ))
}

/// Rotation angle and detuning phase of a single-qubit gate from a z-offset
/// scan: `cos Ω(z) = cos(μ/2)·cos(ζ + z/2)` is linear in `(cos(z/2),
/// sin(z/2))`, so `(μ, ζ)` follow from a two-column least-squares fit.
pub fn estimate_single_qubit(records: &[SingleQubitRecord]) -> Result<EstimationResult> {
    let mut offsets: Vec<f64> = Vec::new();
    for r in records {
        if !offsets.contains(&r.z) {
            offsets.push(r.z);
        }
    }
    if offsets.len() < 2 {
        return Err(Error::InsufficientData(
            "the z scan needs at least two offsets".into(),
        ));
    }

    let mut rows = Vec::with_capacity(offsets.len());
    let mut result = EstimationResult::default();
    result.diagnostics.unwrap_margin = std::f64::consts::PI;
    for &z in &offsets {
        let group: Vec<&SingleQubitRecord> = records.iter().filter(|r| r.z == z).collect();
        let (omega, omega_err, rms, margin) = rabi_angle(&group)?;
        result.fit_residual_rms = result.fit_residual_rms.max(rms);
        result.diagnostics.unwrap_margin = result.diagnostics.unwrap_margin.min(margin);
        let (s, co) = (z / 2.0).sin_cos();
        rows.push((co, -s, omega.cos(), omega.sin().abs() * omega_err));
    }

    let mut normal = Matrix2::zeros();
    let mut rhs = Vector2::zeros();
    for &(a, b, y, _) in &rows {
        let x = Vector2::new(a, b);
        normal += x * x.transpose();
        rhs += x * y;
    }
    let inverse = normal.try_inverse().ok_or_else(|| {
        Error::InsufficientData("z offsets do not separate the two quadratures".into())
    })?;
    let coef = inverse * rhs;
    let mut cov_y = Matrix2::zeros();
    for &(a, b, _, err) in &rows {
        let x = Vector2::new(a, b);
        cov_y += x * x.transpose() * (err * err);
    }
    let cov = inverse * cov_y * inverse;
    let (a, b) = (coef[0], coef[1]);

    let amplitude = a.hypot(b);
    let half_cos = if a < 0.0 { -amplitude } else { amplitude };
    let mu = 2.0 * half_cos.clamp(-1.0, 1.0).acos();
    let zeta = if amplitude > 1e-12 {
        (b / a).atan()
    } else {
        0.0
    };
    if amplitude <= 1e-12 {
        result.diagnostics.indefinite.push(names::ZETA.to_string());
    }

    let amp_err = if amplitude > 0.0 {
        ((a * a * cov[(0, 0)] + b * b * cov[(1, 1)] + 2.0 * a * b * cov[(0, 1)])
            / (amplitude * amplitude))
            .max(0.0)
            .sqrt()
    } else {
        cov[(0, 0)].max(cov[(1, 1)]).sqrt()
    };
    let mu_err = 2.0 * amp_err / (1.0 - half_cos * half_cos).max(1e-300).sqrt();
    let zeta_err = if amplitude > 1e-12 {
        ((b * b * cov[(0, 0)] + a * a * cov[(1, 1)] - 2.0 * a * b * cov[(0, 1)])
            / amplitude.powi(4))
        .max(0.0)
        .sqrt()
    } else {
        0.0
    };
    result.set(names::MU, mu, mu_err);
    result.set(names::ZETA, zeta, zeta_err);
    Ok(result)
}

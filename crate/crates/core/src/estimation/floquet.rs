use super::cphase::sorted_matrices;
use super::phase::{fit_linear_phase_demodulated, PhaseSeries};
use super::{log_decay_rate, names, EstimationResult};
use crate::circuits::DepthRecord;
use crate::error::Result;
use crate::linalg::{cis, polar_unitary, su2_components, wrap_angle};
use nalgebra::{Matrix3, SymmetricEigen, Vector3};

/// Z phases from the bare-gate family, given a prior swap-angle estimate.
///
/// `γ` comes from `det M_n = e^{−2inγ}`. After removing `e^{−inγ}`, the
/// unitary factor of `M_n` is `W_odd^n`, whose rotation angle grows as `nΩ`
/// with `cos Ω = cos θ cos ζ`. When noise pushes `cos Ω` above `cos θ̂`, `ζ`
/// is set to zero.
pub fn estimate_z_phases(records: &[DepthRecord], theta_hat: f64) -> Result<EstimationResult> {
    let mats = sorted_matrices(records, DepthRecord::matrix)?;
    let depths: Vec<usize> = mats.iter().map(|(d, _)| *d).collect();
    let dets: Vec<_> = mats.iter().map(|(_, m)| m.determinant()).collect();

    let det_series = PhaseSeries::new(depths.clone(), dets.iter().map(|d| d.arg()).collect())?;
    let det_fit = fit_linear_phase_demodulated(&det_series)?;
    let gamma = -wrap_angle(det_fit.slope) / 2.0;

    let components: Vec<(f64, Vector3<f64>)> = mats
        .iter()
        .map(|(n, m)| {
            let u = polar_unitary(m) * cis(*n as f64 * gamma);
            let (a0, a) = su2_components(&u);
            (a0, Vector3::new(a[0], a[1], a[2]))
        })
        .collect();
    let axis = principal_axis(components.iter().map(|(_, a)| *a));
    let angles = components
        .iter()
        .map(|(a0, a)| a.dot(&axis).atan2(*a0))
        .collect();
    let rot_fit = fit_linear_phase_demodulated(&PhaseSeries::new(depths.clone(), angles)?)?;
    let omega = wrap_angle(rot_fit.slope);

    let cos_theta = theta_hat.cos();
    let ratio = omega.cos() / cos_theta;
    let zeta = if ratio >= 1.0 {
        0.0
    } else {
        omega.signum() * ratio.max(-1.0).acos()
    };
    let zeta_err = if zeta.sin().abs() > 1e-12 {
        (omega.sin() / (cos_theta * zeta.sin())).abs() * rot_fit.slope_stderr
    } else {
        rot_fit.slope_stderr
    };

    let mut result = EstimationResult::default();
    result.set(names::GAMMA, gamma, det_fit.slope_stderr / 2.0);
    result.set(names::ZETA, zeta, zeta_err);
    result.fit_residual_rms = det_fit.residual_rms.max(rot_fit.residual_rms);
    result.diagnostics.unwrap_margin = det_fit.unwrap_margin.min(rot_fit.unwrap_margin);
    let mags: Vec<f64> = dets.iter().map(|d| d.norm()).collect();
    result.diagnostics.contrast_decay_rate = log_decay_rate(&depths, &mags);
    Ok(result)
}

/// Dominant direction of a set of (anti)parallel vectors, oriented to a
/// non-negative z component.
fn principal_axis(vectors: impl Iterator<Item = Vector3<f64>>) -> Vector3<f64> {
    let scatter = vectors.fold(Matrix3::zeros(), |acc, v| acc + v * v.transpose());
    let eig = SymmetricEigen::new(scatter);
    let i = eig.eigenvalues.imax();
    let mut axis: Vector3<f64> = eig.eigenvectors.column(i).into_owned();
    if axis.z < 0.0 {
        axis = -axis;
    }
    axis
}

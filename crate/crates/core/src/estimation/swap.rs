use super::phase::{fit_linear_phase_demodulated, LinearPhaseFit, PhaseSeries};
use super::{log_decay_rate, names, EstimationResult};
use crate::circuits::{DepthRecord, Prep};
use crate::error::{Error, Result};
use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector3};

/// Below this ratio of the smallest to the middle spread of the trajectory,
/// the fitted rotation axis is taken from the full 3D fit; otherwise the
/// arc is too short to resolve the axis tilt and the axis is placed in the
/// equatorial plane. The tilt changes the angle only at second order.
const TILT_RESOLVED: f64 = 0.05;

/// Largest `|axis · start|` accepted from the 3D fit. A real swap axis sits
/// near the equator; on a short noisy arc the flattest scatter direction is
/// instead the pole itself, because shot noise vanishes there.
const MAX_AXIS_POLAR: f64 = 0.5;

/// Which inversion turns the fitted rotation angles into `(θ, χ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SwapBranch {
    /// `sin Ω = sin θ |cos χ|`, valid at every angle.
    #[default]
    Exact,
    /// The first-order model `Ω = θ |cos χ|`.
    SmallAngle,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SwapOptions {
    /// Detuning phase used to orient the in-plane rotation axes. The Floquet
    /// estimate of `ζ` is the natural choice.
    pub zeta_ref: f64,
    pub branch: SwapBranch,
}

/// Rotation of the odd-parity Bloch vector per cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationFit {
    /// Unit rotation axis; the sign of `fit.slope` is taken about it.
    pub axis: [f64; 3],
    /// Whether the axis tilt came from the data or was set to zero.
    pub tilt_resolved: bool,
    pub fit: LinearPhaseFit,
    pub contrast_decay_rate: f64,
}

impl RotationFit {
    /// Rotation vector for two cycles (one `C²`).
    pub fn rotation_vector(&self) -> [f64; 3] {
        let a = 2.0 * self.fit.slope;
        [a * self.axis[0], a * self.axis[1], a * self.axis[2]]
    }

    /// `Ω`, a quarter of the two-cycle rotation angle.
    pub fn rabi_angle(&self) -> f64 {
        self.fit.slope.abs() / 2.0
    }
}

fn start_vector(records: &[DepthRecord]) -> Result<(Prep, Vector3<f64>)> {
    let first = records
        .first()
        .ok_or_else(|| Error::InsufficientData("empty swap family".into()))?;
    if first.bloch(Prep::Zero1).is_some() {
        Ok((Prep::Zero1, Vector3::z()))
    } else if first.bloch(Prep::One0).is_some() {
        Ok((Prep::One0, -Vector3::z()))
    } else {
        Err(Error::InsufficientData(
            "records carry no odd-parity Bloch vector".into(),
        ))
    }
}

/// Fits the rotation that carries the prepared state along the measured
/// trajectory: the axis is the direction orthogonal to every displacement
/// from the start, and the angle is unwrapped and fitted against depth.
pub fn rotation_fit(records: &[DepthRecord]) -> Result<RotationFit> {
    let (prep, start) = start_vector(records)?;
    let mut points: Vec<(usize, Vector3<f64>)> = records
        .iter()
        .map(|r| {
            let b = r.bloch(prep).ok_or_else(|| {
                Error::InsufficientData(format!("missing Bloch vector at depth {}", r.depth))
            })?;
            Ok((r.depth, Vector3::new(b[0], b[1], b[2])))
        })
        .collect::<Result<_>>()?;
    points.sort_by_key(|(d, _)| *d);

    let scatter = points.iter().fold(Matrix3::zeros(), |acc, (_, b)| {
        acc + (b - start) * (b - start).transpose()
    });
    let eig = SymmetricEigen::new(scatter);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let (low, mid) = (
        eig.eigenvalues[order[0]].max(0.0),
        eig.eigenvalues[order[1]],
    );
    let flattest: Vector3<f64> = eig.eigenvectors.column(order[0]).into_owned();
    let tilt_resolved = mid > 0.0
        && low <= TILT_RESOLVED * TILT_RESOLVED * mid
        && flattest.dot(&start).abs() <= MAX_AXIS_POLAR;
    let axis: Vector3<f64> = if tilt_resolved {
        flattest
    } else {
        let planar = points.iter().fold(Matrix2::zeros(), |acc, (_, b)| {
            let v = nalgebra::Vector2::new(b.x, b.y);
            acc + v * v.transpose()
        });
        let e = SymmetricEigen::new(planar);
        let p = e.eigenvectors.column(e.eigenvalues.imax()).into_owned();
        Vector3::new(p.y, -p.x, 0.0)
    };
    let axis = axis.normalize();

    let project = |v: &Vector3<f64>| v - axis * v.dot(&axis);
    let p0 = project(&start);
    let depths: Vec<usize> = points.iter().map(|(d, _)| *d).collect();
    let angles: Vec<f64> = points
        .iter()
        .map(|(_, b)| {
            let p = project(b);
            axis.dot(&p0.cross(&p)).atan2(p0.dot(&p))
        })
        .collect();
    let fit = fit_linear_phase_demodulated(&PhaseSeries::new(depths.clone(), angles)?)?;
    let lengths: Vec<f64> = points.iter().map(|(_, b)| b.norm()).collect();
    Ok(RotationFit {
        axis: [axis.x, axis.y, axis.z],
        tilt_resolved,
        fit,
        contrast_decay_rate: log_decay_rate(&depths, &lengths),
    })
}

/// Swap angle and its standard error from the two rotation fits.
pub fn theta_from_fits(fx: &RotationFit, fy: &RotationFit, branch: SwapBranch) -> (f64, f64) {
    let (omega, omega_bar) = (fx.rabi_angle(), fy.rabi_angle());
    let (err, err_bar) = (fx.fit.slope_stderr / 2.0, fy.fit.slope_stderr / 2.0);
    match branch {
        SwapBranch::Exact => {
            let (sx, sy) = (omega.sin(), omega_bar.sin());
            let norm = sx.hypot(sy);
            let theta = norm.min(1.0).asin();
            let grad = ((sx * omega.cos() * err).powi(2)
                + (sy * omega_bar.cos() * err_bar).powi(2))
            .sqrt();
            let err = if norm > 0.0 {
                grad / (norm * (1.0 - norm * norm).max(1e-300).sqrt())
            } else {
                err.hypot(err_bar)
            };
            (theta, err)
        }
        SwapBranch::SmallAngle => {
            let theta = omega.hypot(omega_bar);
            let err = if theta > 0.0 {
                ((omega * err).powi(2) + (omega_bar * err_bar).powi(2)).sqrt() / theta
            } else {
                err.hypot(err_bar)
            };
            (theta, err)
        }
    }
}

/// Swap angle and azimuth from the `X⊗X` and `Y⊗X` swap families.
///
/// The two-cycle rotation angles are `4Ω` and `4Ω̄` with `sin Ω = sin θ |cos χ|`
/// and `sin Ω̄ = sin θ |sin χ|`. The signs of `cos χ` and `sin χ` come from the
/// in-plane direction of each rotation vector after undoing `zeta_ref`.
///
/// Markovian dephasing shrinks the transverse odd-parity components but not
/// `Z_odd`, which pulls short arcs toward the pole and biases `θ̂` low.
pub fn estimate_theta_chi(
    records_x: &[DepthRecord],
    records_y: &[DepthRecord],
    opts: &SwapOptions,
) -> Result<EstimationResult> {
    let fx = rotation_fit(records_x)?;
    let fy = rotation_fit(records_y)?;
    let (omega, omega_bar) = (fx.rabi_angle(), fy.rabi_angle());
    let (err, err_bar) = (fx.fit.slope_stderr / 2.0, fy.fit.slope_stderr / 2.0);
    let (theta, theta_err) = theta_from_fits(&fx, &fy, opts.branch);
    let (sx, sy) = match opts.branch {
        SwapBranch::Exact => (omega.sin(), omega_bar.sin()),
        SwapBranch::SmallAngle => (omega, omega_bar),
    };
    let norm = sx.hypot(sy);

    let (cz, sz) = (opts.zeta_ref.cos(), opts.zeta_ref.sin());
    let rx = fx.rotation_vector();
    let ry = fy.rotation_vector();
    let cos_component = rx[0] * cz - rx[1] * sz;
    let sin_component = -(ry[0] * sz + ry[1] * cz);
    let floor_x = (6.0 * fx.fit.slope_stderr).max(1e-12);
    let floor_y = (6.0 * fy.fit.slope_stderr).max(1e-12);

    let mut result = EstimationResult::default();
    result.set(names::THETA, theta, theta_err);
    result.fit_residual_rms = fx.fit.residual_rms.max(fy.fit.residual_rms);
    result.diagnostics.unwrap_margin = fx.fit.unwrap_margin.min(fy.fit.unwrap_margin);
    result.diagnostics.contrast_decay_rate = fx.contrast_decay_rate.max(fy.contrast_decay_rate);

    let rotating_x = 4.0 * omega > floor_x;
    let rotating_y = 4.0 * omega_bar > floor_y;
    if !rotating_x && !rotating_y {
        result.set(names::CHI, 0.0, 0.0);
        result.diagnostics.indefinite.push(names::CHI.to_string());
        return Ok(result);
    }
    let unresolved_x = rotating_x && cos_component.abs() <= floor_x;
    let unresolved_y = rotating_y && sin_component.abs() <= floor_y;
    if unresolved_x && unresolved_y {
        return Err(Error::AmbiguousSign);
    }
    let sign = |v: f64| if v < 0.0 { -1.0 } else { 1.0 };
    let chi = (sign(sin_component) * sy).atan2(sign(cos_component) * sx);
    let chi_err = ((sx * omega_bar.cos() * err_bar).powi(2) + (sy * omega.cos() * err).powi(2))
        .sqrt()
        / (norm * norm).max(1e-300);
    result.set(names::CHI, chi, chi_err);
    if unresolved_x || unresolved_y {
        result.diagnostics.indefinite.push(names::CHI.to_string());
    }
    Ok(result)
}

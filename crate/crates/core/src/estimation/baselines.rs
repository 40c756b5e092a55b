use super::cphase::sorted_matrices;
use super::{names, EstimationResult};
use crate::circuits::{DepthRecord, PhaseMethodRecords};
use crate::error::{Error, Result};
use crate::gate_algebra::extract_params;
use crate::linalg::{c, direct_sum, polar_unitary, Mat2};
use nalgebra::{Matrix2, Vector2};
use std::f64::consts::PI;

/// All five parameters from a depth-1 tomography record. The odd block is
/// read against `|00>` and projected onto the nearest unitary; the `|11>`
/// element is the least-squares ratio of the two reference matrices.
pub fn estimate_tomography(record: &DepthRecord) -> Result<EstimationResult> {
    let missing = || Error::InsufficientData("tomography record lacks a reference matrix".into());
    let m0 = record.matrix().ok_or_else(missing)?;
    let m1 = record.matrix_ref11().ok_or_else(missing)?;
    let weight: f64 = m0.iter().map(|z| z.norm_sqr()).sum();
    if weight < 1e-12 {
        return Err(Error::DegenerateMatrix {
            depth: record.depth,
            det_abs: m0.determinant().norm(),
        });
    }
    let w33 = m1
        .iter()
        .zip(m0.iter())
        .map(|(a, b)| a * b)
        .sum::<crate::linalg::C64>()
        / weight;
    let w33 = if w33.norm() > 0.0 {
        w33 / w33.norm()
    } else {
        c(1.0, 0.0)
    };
    let even = Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), w33);
    let u = direct_sum(&even, &polar_unitary(&m0));
    let extracted = extract_params(&u)?;
    let p = extracted.params;

    let mut result = EstimationResult::default();
    for (name, value) in [
        (names::THETA, p.theta),
        (names::ZETA, p.zeta),
        (names::CHI, p.chi),
        (names::PHI, p.phi),
        (names::GAMMA, p.gamma),
    ] {
        result.set(name, value, 0.0);
    }
    result.diagnostics.unwrap_margin = PI;
    if !extracted.chi_defined {
        result.diagnostics.indefinite.push(names::CHI.to_string());
    }
    Ok(result)
}

/// `cos` of the eigenphase splitting of a 2×2 matrix, independent of its
/// global phase and of the eigenvalue order.
fn splitting_cos(m: &Mat2) -> f64 {
    let t = m.trace();
    ((t * t / m.determinant()).re / 2.0 - 1.0).clamp(-1.0, 1.0)
}

/// Swap angle from the phase-method records.
///
/// Per inserted phase `z`, the eigenphase splitting `2nΩ_z` is folded into
/// `[0, π]` at every depth; each deeper depth picks the branch closest to the
/// shallower estimate. `cos Ω_z = A cos(z/2) − B sin(z/2)` with
/// `A² + B² = cos²θ` then gives `θ`.
pub fn estimate_phase_method(records: &PhaseMethodRecords) -> Result<EstimationResult> {
    if records.z_phases.len() != records.series.len() || records.z_phases.len() < 2 {
        return Err(Error::InsufficientData(
            "one series per inserted phase, at least two".into(),
        ));
    }
    let mut normal = Matrix2::zeros();
    let mut rhs = Vector2::zeros();
    for (&z, series) in records.z_phases.iter().zip(&records.series) {
        let m0 = sorted_matrices(series, DepthRecord::matrix)?;
        let m1 = sorted_matrices(series, DepthRecord::matrix_ref11)?;
        let mut omega: Option<f64> = None;
        for ((n, a), (_, b)) in m0.iter().zip(&m1) {
            let split = (0.5 * (splitting_cos(a) + splitting_cos(b))).acos();
            let n = *n as f64;
            omega = Some(match omega {
                None => split / (2.0 * n),
                Some(prev) => {
                    let mut best = f64::INFINITY;
                    let mut pick = prev;
                    for k in 0..=(n.ceil() as usize) {
                        for sgn in [1.0, -1.0] {
                            let cand = (sgn * split + 2.0 * PI * k as f64) / (2.0 * n);
                            if (cand - prev).abs() < best {
                                best = (cand - prev).abs();
                                pick = cand;
                            }
                        }
                    }
                    pick
                }
            });
        }
        let omega =
            omega.ok_or_else(|| Error::InsufficientData("empty phase-method series".into()))?;
        let x = Vector2::new((z / 2.0).cos(), -(z / 2.0).sin());
        normal += x * x.transpose();
        rhs += x * omega.cos();
    }
    let coef = normal.try_inverse().ok_or_else(|| {
        Error::InsufficientData("inserted phases do not separate the quadratures".into())
    })? * rhs;
    let theta = coef.norm().min(1.0).acos();
    let mut result = EstimationResult::default();
    result.set(names::THETA, theta, 0.0);
    result.diagnostics.unwrap_margin = PI;
    Ok(result)
}

use crate::error::{Error, Result};
use crate::linalg::wrap_angle;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use std::f64::consts::FRAC_PI_2;

/// Which decoherence-limited experiment a bound refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarianceMode {
    /// A phase gate repeated `n` times on `|+>`, read out in two quadratures.
    SingleQubitPhase,
    /// Swap oscillation from `|01>` with amplitude-damping postselection,
    /// read out in two quadratures.
    TwoQubitSwap,
}

fn check_rates(lambda1: f64, lambda2: f64) -> Result<()> {
    if !(lambda1 >= 0.0 && lambda2 >= 0.0) || !lambda1.is_finite() || !lambda2.is_finite() {
        return Err(Error::config(
            "lambda",
            "decay rates must be finite and non-negative",
        ));
    }
    Ok(())
}

/// Variance bound at depth `n` with `m` shots per quadrature, and the depth
/// `n*` that minimizes it (infinite without decoherence).
pub fn variance_bound(
    mode: VarianceMode,
    lambda1: f64,
    lambda2: f64,
    m: u64,
    n: usize,
) -> Result<(f64, f64)> {
    check_rates(lambda1, lambda2)?;
    if m == 0 || n == 0 {
        return Err(Error::config("m", "shots and depth must be at least one"));
    }
    let (m, nf) = (m as f64, n as f64);
    Ok(match mode {
        VarianceMode::SingleQubitPhase => {
            let rate = lambda1 + lambda2;
            ((2.0 * nf * rate).exp() / (m * nf * nf), 1.0 / rate)
        }
        VarianceMode::TwoQubitSwap => {
            let rate = lambda1 + 4.0 * lambda2;
            ((nf * rate).exp() / (4.0 * m * nf * nf), 2.0 / rate)
        }
    })
}

/// Probability of outcome `+1` after `n` phase gates `Z(φ)` on `|+>`, read
/// out along `Z(−s)XZ(s)`: excitation loss mixes toward a fair coin and
/// dephasing shrinks the fringe.
pub fn phase_outcome_probability(n: usize, phi: f64, s: f64, lambda1: f64, lambda2: f64) -> f64 {
    let nf = n as f64;
    let kept = (-nf * lambda1).exp();
    let q = 0.5 * (1.0 + (-nf * lambda2).exp() * (nf * phi + s).cos());
    kept * q + 0.5 * (1.0 - kept)
}

/// Probability of finding the excitation transferred after `n` swap cycles,
/// within the postselected single-excitation subspace, with a quadrature
/// phase `s`.
pub fn swap_outcome_probability(n: usize, theta: f64, s: f64, lambda2: f64) -> f64 {
    let nf = n as f64;
    0.5 * (1.0 - (-2.0 * nf * lambda2).exp() * (2.0 * nf * theta + s).cos())
}

fn binomial<R: Rng + ?Sized>(trials: u64, p: f64, rng: &mut R) -> u64 {
    Binomial::new(trials, p.clamp(0.0, 1.0))
        .expect("probability clamped to [0, 1]")
        .sample(rng)
}

/// Monte Carlo phase estimates from `m` shots in each quadrature
/// `s ∈ {0, π/2}` at depth `n`; the `2π/n` branch nearest the truth is kept.
pub fn simulate_phase_estimates<R: Rng + ?Sized>(
    phi: f64,
    n: usize,
    m: u64,
    lambda1: f64,
    lambda2: f64,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_rates(lambda1, lambda2)?;
    let p0 = phase_outcome_probability(n, phi, 0.0, lambda1, lambda2);
    let p1 = phase_outcome_probability(n, phi, FRAC_PI_2, lambda1, lambda2);
    let nf = n as f64;
    Ok((0..trials)
        .map(|_| {
            let c = 2.0 * binomial(m, p0, rng) as f64 / m as f64 - 1.0;
            let s = 2.0 * binomial(m, p1, rng) as f64 / m as f64 - 1.0;
            let psi = (-s).atan2(c);
            phi + wrap_angle(psi - nf * phi) / nf
        })
        .collect())
}

/// Monte Carlo swap-angle estimates at depth `n`: each quadrature keeps the
/// `Binomial(m, e^{−nλ1})` shots that still hold the excitation.
pub fn simulate_swap_estimates<R: Rng + ?Sized>(
    theta: f64,
    n: usize,
    m: u64,
    lambda1: f64,
    lambda2: f64,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_rates(lambda1, lambda2)?;
    let nf = n as f64;
    let survive = (-nf * lambda1).exp();
    let p0 = swap_outcome_probability(n, theta, 0.0, lambda2);
    let p1 = swap_outcome_probability(n, theta, FRAC_PI_2, lambda2);
    let quadrature = |p: f64, rng: &mut R| {
        let kept = binomial(m, survive, rng);
        if kept == 0 {
            return 0.0;
        }
        1.0 - 2.0 * binomial(kept, p, rng) as f64 / kept as f64
    };
    Ok((0..trials)
        .map(|_| {
            let c = quadrature(p0, rng);
            let s = quadrature(p1, rng);
            let psi = (-s).atan2(c);
            theta + wrap_angle(psi - 2.0 * nf * theta) / (2.0 * nf)
        })
        .collect())
}

/// Depth of minimum variance from a scan: the vertex of a quadratic fit of
/// `ln V` against `ln n`.
pub fn optimal_depth_from_scan(depths: &[usize], variances: &[f64]) -> Result<f64> {
    if depths.len() < 3 || depths.len() != variances.len() {
        return Err(Error::InsufficientData(
            "the depth scan needs at least three points".into(),
        ));
    }
    let x: Vec<f64> = depths.iter().map(|&d| (d as f64).ln()).collect();
    let y: Vec<f64> = variances.iter().map(|v| v.ln()).collect();
    let mut normal = nalgebra::Matrix3::<f64>::zeros();
    let mut rhs = nalgebra::Vector3::<f64>::zeros();
    for (xi, yi) in x.iter().zip(&y) {
        let row = nalgebra::Vector3::new(1.0, *xi, xi * xi);
        normal += row * row.transpose();
        rhs += row * *yi;
    }
    let coef = normal
        .try_inverse()
        .ok_or_else(|| Error::InsufficientData("degenerate depth scan".into()))?
        * rhs;
    if coef[2] <= 0.0 {
        return Err(Error::InsufficientData(
            "variance scan has no interior minimum".into(),
        ));
    }
    Ok((-coef[1] / (2.0 * coef[2])).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probabilities_without_decay() {
        assert!((phase_outcome_probability(3, 0.0, 0.0, 0.0, 0.0) - 1.0).abs() < 1e-15);
        assert!((swap_outcome_probability(5, 0.0, 0.0, 0.0)).abs() < 1e-15);
    }

    #[test]
    fn negative_rates_are_rejected() {
        assert!(variance_bound(VarianceMode::SingleQubitPhase, -1.0, 0.0, 10, 1).is_err());
    }
}

//! Error models: quasi-static phase drift, systematic microwave errors on
//! decoupling pulses, per-cycle amplitude and phase damping, and finite-shot
//! readout.

use crate::error::{Error, Result};
use crate::linalg::{c, exp_pauli_vector, kron, z_rot, Mat2, Mat4, Pauli, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// Width of the per-instance offset added to `ζ`.
    pub zeta_drift_std: f64,
    /// Width of the per-instance offset added to `γ`.
    pub gamma_drift_std: f64,
    /// Width of the per-instance detuning phase on single-qubit pulse slots.
    pub sq_phase_drift_std: f64,
    /// `(εX, εY, εZ)` on every decoupling pulse of the left qubit.
    pub mw_error_left: [f64; 3],
    /// `(εX, εY, εZ)` on every decoupling pulse of the right qubit.
    pub mw_error_right: [f64; 3],
    /// Gate time over T1.
    pub lambda1: f64,
    /// Gate time over T2.
    pub lambda2: f64,
    pub shots: u64,
    /// Skip sampling and report exact outcome probabilities.
    pub exact: bool,
    pub readout_flip: f64,
    pub seed: u64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            zeta_drift_std: 0.0,
            gamma_drift_std: 0.0,
            sq_phase_drift_std: 0.0,
            mw_error_left: [0.0; 3],
            mw_error_right: [0.0; 3],
            lambda1: 0.0,
            lambda2: 0.0,
            shots: 1000,
            exact: false,
            readout_flip: 0.0,
            seed: 0,
        }
    }
}

impl NoiseConfig {
    /// Noiseless, exact-expectation configuration.
    pub fn exact() -> Self {
        NoiseConfig {
            exact: true,
            ..NoiseConfig::default()
        }
    }

    pub fn with_shots(shots: u64, seed: u64) -> Self {
        NoiseConfig {
            shots,
            seed,
            ..NoiseConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let non_negative = [
            ("noise.zeta_drift_std", self.zeta_drift_std),
            ("noise.gamma_drift_std", self.gamma_drift_std),
            ("noise.sq_phase_drift_std", self.sq_phase_drift_std),
            ("noise.lambda1", self.lambda1),
            ("noise.lambda2", self.lambda2),
            ("noise.readout_flip", self.readout_flip),
        ];
        for (field, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(
                    field,
                    format!("must be finite and >= 0, got {v}"),
                ));
            }
        }
        for (field, eps) in [
            ("noise.mw_error_left", self.mw_error_left),
            ("noise.mw_error_right", self.mw_error_right),
        ] {
            if eps.iter().any(|v| !v.is_finite()) {
                return Err(Error::config(field, "components must be finite"));
            }
        }
        if self.readout_flip >= 0.5 {
            return Err(Error::config("noise.readout_flip", "must be below 0.5"));
        }
        if self.shots == 0 {
            return Err(Error::config("noise.shots", "must be at least 1"));
        }
        Ok(())
    }

    pub fn has_decoherence(&self) -> bool {
        self.lambda1 > 0.0 || self.lambda2 > 0.0
    }
}

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CellKey {
    pub realization: u64,
    pub circuit: u64,
    pub depth: u64,
    pub basis: u64,
}

impl CellKey {
    pub fn new(realization: u64, circuit: u64, depth: u64, basis: u64) -> Self {
        CellKey {
            realization,
            circuit,
            depth,
            basis,
        }
    }

    fn stream_id(&self) -> u64 {
        let mut h = 0x6a09_e667_f3bc_c908u64;
        for part in [self.realization, self.circuit, self.depth, self.basis] {
            h = splitmix64(h ^ part);
        }
        h
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic generator for one cell, derived from the root seed.
pub fn cell_rng(seed: u64, key: CellKey) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(key.stream_id());
    rng
}

/// Basis slot reserved for drift draws so they never share a stream with
/// shot sampling.
pub const DRIFT_BASIS: u64 = u64::MAX;

/// Quasi-static offsets seen by every gate of one circuit instance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NoiseRealization {
    pub zeta_offset: f64,
    pub gamma_offset: f64,
    pub sq_phase_offsets: [f64; 2],
}

/// Draws the offsets for the instance `(realization, circuit, depth)`.
pub fn draw_realization(
    cfg: &NoiseConfig,
    realization: u64,
    circuit: u64,
    depth: u64,
) -> NoiseRealization {
    let mut rng = cell_rng(
        cfg.seed,
        CellKey::new(realization, circuit, depth, DRIFT_BASIS),
    );
    let mut draw = |std: f64| {
        if std > 0.0 {
            Normal::new(0.0, std).expect("finite std").sample(&mut rng)
        } else {
            0.0
        }
    };
    NoiseRealization {
        zeta_offset: draw(cfg.zeta_drift_std),
        gamma_offset: draw(cfg.gamma_drift_std),
        sq_phase_offsets: [draw(cfg.sq_phase_drift_std), draw(cfg.sq_phase_drift_std)],
    }
}

/// `exp(−i ε·σ)·X`, the full exponential rather than its linearization.
pub fn noisy_x_gate(eps: [f64; 3]) -> Mat2 {
    exp_pauli_vector(eps) * Pauli::X.matrix()
}

/// A π pulse about the equatorial axis at angle `axis`, with the systematic
/// error defined in the pulse's own frame: `Z(axis)·exp(−iε·σ)X·Z(−axis)`.
pub fn noisy_pi_pulse(eps: [f64; 3], axis: f64) -> Mat2 {
    z_rot(axis) * noisy_x_gate(eps) * z_rot(-axis)
}

/// Over-rotation fraction expressed as the `εX` component.
pub fn over_rotation_eps(fraction: f64) -> [f64; 3] {
    [fraction * std::f64::consts::FRAC_PI_2, 0.0, 0.0]
}

/// Kraus operators of one cycle of amplitude damping (decay probability
/// `1 − e^{−λ1}`) followed by phase damping (coherence factor `e^{−λ2}`).
pub fn decoherence_kraus(lambda1: f64, lambda2: f64) -> Vec<Mat2> {
    let p = 1.0 - (-lambda1).exp();
    let f = (-lambda2).exp();
    let o = c(0.0, 0.0);
    let ad0 = Mat2::new(c(1.0, 0.0), o, o, c((1.0 - p).sqrt(), 0.0));
    let ad1 = Mat2::new(o, c(p.sqrt(), 0.0), o, o);
    let pd0 = Mat2::identity() * c(((1.0 + f) / 2.0).sqrt(), 0.0);
    let pd1 = Pauli::Z.matrix() * c(((1.0 - f) / 2.0).sqrt(), 0.0);
    let mut out = Vec::with_capacity(4);
    for pd in [pd0, pd1] {
        for ad in [ad0, ad1] {
            out.push(pd * ad);
        }
    }
    out
}

const STATE_TOLERANCE: f64 = 1e-9;

fn check_state<const D: usize>(rho: &nalgebra::SMatrix<C64, D, D>) -> Result<()> {
    let trace = rho.trace();
    if (trace - c(1.0, 0.0)).norm() > STATE_TOLERANCE {
        return Err(Error::InvalidState(format!("trace {trace}")));
    }
    let herm = (rho - rho.adjoint()).norm();
    if herm > STATE_TOLERANCE {
        return Err(Error::InvalidState(format!(
            "not Hermitian (defect {herm:.3e})"
        )));
    }
    let min_eig = nalgebra::DMatrix::from_iterator(D, D, rho.iter().cloned())
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if min_eig < -STATE_TOLERANCE {
        return Err(Error::InvalidState(format!(
            "negative eigenvalue {min_eig:.3e}"
        )));
    }
    Ok(())
}

/// One cycle of decoherence on a single qubit.
pub fn apply_decoherence_cycle_1q(rho: &Mat2, lambda1: f64, lambda2: f64) -> Result<Mat2> {
    check_state(rho)?;
    Ok(decohere_1q(rho, lambda1, lambda2))
}

/// One cycle of independent decoherence on both qubits.
pub fn apply_decoherence_cycle_2q(rho: &Mat4, lambda1: f64, lambda2: f64) -> Result<Mat4> {
    check_state(rho)?;
    Ok(decohere_2q(rho, lambda1, lambda2))
}

pub(crate) fn decohere_1q(rho: &Mat2, lambda1: f64, lambda2: f64) -> Mat2 {
    if lambda1 == 0.0 && lambda2 == 0.0 {
        return *rho;
    }
    decoherence_kraus(lambda1, lambda2)
        .iter()
        .fold(Mat2::zeros(), |acc, k| acc + k * rho * k.adjoint())
}

pub(crate) fn decohere_2q(rho: &Mat4, lambda1: f64, lambda2: f64) -> Mat4 {
    if lambda1 == 0.0 && lambda2 == 0.0 {
        return *rho;
    }
    let kraus = decoherence_kraus(lambda1, lambda2);
    let id = Mat2::identity();
    let left = kraus
        .iter()
        .map(|k| kron(k, &id))
        .fold(Mat4::zeros(), |acc, k| acc + k * rho * k.adjoint());
    kraus
        .iter()
        .map(|k| kron(&id, k))
        .fold(Mat4::zeros(), |acc, k| acc + k * left * k.adjoint())
}

const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

fn clean_distribution(probabilities: &[f64]) -> Result<Vec<f64>> {
    if probabilities.is_empty() {
        return Err(Error::BadDistribution("no outcomes".into()));
    }
    if let Some(p) = probabilities
        .iter()
        .find(|p| !p.is_finite() || **p < -DISTRIBUTION_TOLERANCE)
    {
        return Err(Error::BadDistribution(format!("invalid probability {p}")));
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE {
        return Err(Error::BadDistribution(format!(
            "probabilities sum to {total}"
        )));
    }
    Ok(probabilities.iter().map(|p| p.max(0.0) / total).collect())
}

/// Applies an independent symmetric flip of probability `flip` to each bit of
/// the outcome index. The outcome count must be a power of two.
pub fn apply_readout_flip(probabilities: &[f64], flip: f64) -> Result<Vec<f64>> {
    let n = probabilities.len();
    if !n.is_power_of_two() {
        return Err(Error::BadDistribution(format!(
            "{n} outcomes is not a bit register"
        )));
    }
    if flip == 0.0 {
        return Ok(probabilities.to_vec());
    }
    let bits = n.trailing_zeros();
    let mut current = probabilities.to_vec();
    for b in 0..bits {
        let mask = 1usize << b;
        let mut next = vec![0.0; n];
        for (i, p) in current.iter().enumerate() {
            next[i] += (1.0 - flip) * p;
            next[i ^ mask] += flip * p;
        }
        current = next;
    }
    Ok(current)
}

/// Multinomial shot counts with per-bit readout flips.
pub fn sample_counts<R: Rng + ?Sized>(
    probabilities: &[f64],
    shots: u64,
    readout_flip: f64,
    rng: &mut R,
) -> Result<Vec<u64>> {
    let p = apply_readout_flip(&clean_distribution(probabilities)?, readout_flip)?;
    let mut counts = vec![0u64; p.len()];
    let mut remaining = shots;
    let mut mass_left = 1.0;
    for (i, &pi) in p.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == p.len() {
            counts[i] = remaining;
            break;
        }
        let q = if mass_left > 0.0 {
            (pi / mass_left).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let k = Binomial::new(remaining, q)
            .map_err(|e| Error::BadDistribution(e.to_string()))?
            .sample(rng);
        counts[i] = k;
        remaining -= k;
        mass_left -= pi;
    }
    Ok(counts)
}

/// Outcome frequencies of one measured circuit: exact probabilities when
/// `cfg.exact`, otherwise sampled counts divided by the shot number.
#[derive(Debug, Clone, PartialEq)]
pub struct Observed {
    pub frequencies: Vec<f64>,
    pub counts: Option<Vec<u64>>,
}

pub fn observe<R: Rng + ?Sized>(
    probabilities: &[f64],
    cfg: &NoiseConfig,
    shots: u64,
    rng: &mut R,
) -> Result<Observed> {
    if cfg.exact {
        let p = apply_readout_flip(&clean_distribution(probabilities)?, cfg.readout_flip)?;
        return Ok(Observed {
            frequencies: p,
            counts: None,
        });
    }
    let counts = sample_counts(probabilities, shots, cfg.readout_flip, rng)?;
    let frequencies = counts.iter().map(|&k| k as f64 / shots as f64).collect();
    Ok(Observed {
        frequencies,
        counts: Some(counts),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_error_pulse_is_x() {
        assert_eq!(noisy_x_gate([0.0; 3]), Pauli::X.matrix());
    }

    #[test]
    fn kraus_completeness() {
        let sum = decoherence_kraus(0.3, 0.2)
            .iter()
            .fold(Mat2::zeros(), |acc, k| acc + k.adjoint() * k);
        assert!((sum - Mat2::identity()).norm() < 1e-12);
    }

    #[test]
    fn zero_rates_are_identity_channel() {
        let rho = Mat2::new(c(0.5, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.5, 0.0));
        assert_eq!(apply_decoherence_cycle_1q(&rho, 0.0, 0.0).unwrap(), rho);
    }

    #[test]
    fn rejects_unnormalized_state() {
        let rho = Mat2::identity();
        assert!(matches!(
            apply_decoherence_cycle_1q(&rho, 0.1, 0.1),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn deterministic_outcome() {
        let mut rng = cell_rng(1, CellKey::new(0, 0, 0, 0));
        let counts = sample_counts(&[1.0, 0.0, 0.0, 0.0], 500, 0.0, &mut rng).unwrap();
        assert_eq!(counts, vec![500, 0, 0, 0]);
    }

    #[test]
    fn bad_distribution_is_rejected() {
        let mut rng = cell_rng(1, CellKey::new(0, 0, 0, 0));
        assert!(sample_counts(&[0.7, 0.7], 10, 0.0, &mut rng).is_err());
        assert!(sample_counts(&[1.1, -0.1], 10, 0.0, &mut rng).is_err());
    }

    #[test]
    fn exact_mode_bypasses_sampling() {
        let mut rng = cell_rng(1, CellKey::new(0, 0, 0, 0));
        let obs = observe(&[0.25, 0.75], &NoiseConfig::exact(), 10, &mut rng).unwrap();
        assert_eq!(obs.frequencies, vec![0.25, 0.75]);
        assert!(obs.counts.is_none());
    }

    #[test]
    fn readout_flip_on_one_bit() {
        let p = apply_readout_flip(&[1.0, 0.0], 0.1).unwrap();
        assert!((p[0] - 0.9).abs() < 1e-15 && (p[1] - 0.1).abs() < 1e-15);
    }
}

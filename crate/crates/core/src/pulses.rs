//! Microwave pulses on a three-level transmon.
//!
//! Envelopes are shifted cosines whose value and slope vanish at the pulse
//! edges. The integrator works in the frame rotating with the anharmonicity,
//! where the ladder Hamiltonian is purely off-diagonal:
//!
//! ```text
//! H(t) = [[0,     Ω*,               0          ],
//!         [Ω,     0,                √2 Ω* e^{iηt}],
//!         [0,     √2 Ω e^{-iηt},    0          ]]
//! ```
//!
//! With `Ω(t) = μ C(t)` and `∫C = 1/2` the qubit subspace rotates by `X(μ)`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

/// Fixed RK4 steps per pulse.
pub const DEFAULT_STEPS: usize = 2000;
/// Allowed drift of the state norm over one pulse.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Shifted-cosine envelope `(1/2T)(1 + cos(2πt/T))` on `[-T/2, T/2]`, zero
/// outside. Its integral over the support is 1/2.
pub fn shifted_cosine(t: f64, duration: f64) -> f64 {
    if t.abs() > duration / 2.0 {
        return 0.0;
    }
    (1.0 + (2.0 * PI * t / duration).cos()) / (2.0 * duration)
}

/// First time derivative of [`shifted_cosine`].
pub fn shifted_cosine_derivative(t: f64, duration: f64) -> f64 {
    if t.abs() > duration / 2.0 {
        return 0.0;
    }
    -PI * (2.0 * PI * t / duration).sin() / (duration * duration)
}

/// Second time derivative of [`shifted_cosine`]; jumps to zero at the edges.
pub fn shifted_cosine_second_derivative(t: f64, duration: f64) -> f64 {
    if t.abs() > duration / 2.0 {
        return 0.0;
    }
    -2.0 * PI * PI * (2.0 * PI * t / duration).cos() / duration.powi(3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseEnvelope {
    /// Target rotation angle μ.
    pub amplitude: f64,
    /// Microwave phase; sets the rotation axis in the XY plane.
    pub phase: f64,
    /// Pulse length T. Times run over `[-T/2, T/2]`.
    pub duration: f64,
    /// Constant detuning Δ, applied as `e^{-iΔt}` on the envelope.
    pub detuning: f64,
    /// Weight k of the derivative mix `Ω + i k Ω'`; zero for a plain pulse.
    pub drag_coefficient: f64,
}

impl PulseEnvelope {
    /// Plain pulse of angle `amplitude` with unit duration.
    pub fn new(amplitude: f64) -> Self {
        PulseEnvelope {
            amplitude,
            phase: 0.0,
            duration: 1.0,
            detuning: 0.0,
            drag_coefficient: 0.0,
        }
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_duration(mut self, duration: f64) -> Self {
        self.duration = duration;
        self
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    /// Undressed drive `μ e^{iϑ} e^{-iΔt} C(t)` and its time derivative.
    fn base(&self, t: f64) -> (Complex64, Complex64) {
        let carrier = Complex64::from_polar(self.amplitude, self.phase - self.detuning * t);
        let c = shifted_cosine(t, self.duration);
        let dc = shifted_cosine_derivative(t, self.duration);
        (
            carrier * c,
            carrier * Complex64::new(dc, -self.detuning * c),
        )
    }

    /// Drive amplitude Ω(t), including the derivative mix.
    pub fn omega(&self, t: f64) -> Complex64 {
        let (value, slope) = self.base(t);
        value + Complex64::i() * self.drag_coefficient * slope
    }

    /// Time derivative of the undressed drive.
    pub fn omega_derivative(&self, t: f64) -> Complex64 {
        self.base(t).1
    }
}

/// DRAG version of `pulse` for anharmonicity `eta`: `Ω + (i/η) Ω'`.
///
/// This sign cancels the `1/η³` edge term of the leakage amplitude in the
/// frame above; the opposite sign doubles it.
pub fn drag_envelope(pulse: &PulseEnvelope, eta: f64) -> PulseEnvelope {
    PulseEnvelope {
        drag_coefficient: 1.0 / eta,
        ..*pulse
    }
}

/// Amplitudes on |0⟩, |1⟩, |2⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelState {
    pub amplitudes: [Complex64; 3],
}

impl ThreeLevelState {
    pub fn basis(level: usize) -> Self {
        let mut amplitudes = [Complex64::new(0.0, 0.0); 3];
        amplitudes[level] = Complex64::new(1.0, 0.0);
        ThreeLevelState { amplitudes }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Amplitude on the second excited level.
    pub fn leakage(&self) -> Complex64 {
        self.amplitudes[2]
    }

    /// Largest amplitude difference to `other`.
    pub fn distance(&self, other: &ThreeLevelState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Final states after one pulse, from each qubit basis state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseEvolution {
    pub from_one: ThreeLevelState,
    pub from_zero: ThreeLevelState,
}

fn derivative(pulse: &PulseEnvelope, eta: f64, t: f64, psi: &[Complex64; 3]) -> [Complex64; 3] {
    let omega = pulse.omega(t);
    let ladder = SQRT_2 * omega * Complex64::from_polar(1.0, -eta * t);
    let minus_i = Complex64::new(0.0, -1.0);
    [
        minus_i * omega.conj() * psi[1],
        minus_i * (omega * psi[0] + ladder.conj() * psi[2]),
        minus_i * ladder * psi[1],
    ]
}

fn axpy(y: &[Complex64; 3], h: f64, k: &[Complex64; 3]) -> [Complex64; 3] {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]]
}

/// Propagate `initial` across the pulse with `steps` RK4 steps.
pub fn evolve(
    pulse: &PulseEnvelope,
    eta: f64,
    initial: ThreeLevelState,
    steps: usize,
) -> Result<ThreeLevelState> {
    if !(eta > 0.0) {
        return Err(Error::config("eta", "anharmonicity must be positive"));
    }
    if !(pulse.duration > 0.0) {
        return Err(Error::config("duration", "pulse duration must be positive"));
    }
    if steps == 0 {
        return Err(Error::config("steps", "need at least one integration step"));
    }
    let h = pulse.duration / steps as f64;
    let start = -pulse.duration / 2.0;
    let mut psi = initial.amplitudes;
    for step in 0..steps {
        let t = start + step as f64 * h;
        let k1 = derivative(pulse, eta, t, &psi);
        let k2 = derivative(pulse, eta, t + h / 2.0, &axpy(&psi, h / 2.0, &k1));
        let k3 = derivative(pulse, eta, t + h / 2.0, &axpy(&psi, h / 2.0, &k2));
        let k4 = derivative(pulse, eta, t + h, &axpy(&psi, h, &k3));
        for i in 0..3 {
            psi[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    let state = ThreeLevelState { amplitudes: psi };
    let drift = (state.norm() - initial.norm()).abs();
    if drift > NORM_TOLERANCE {
        return Err(Error::StepTooLarge(drift));
    }
    Ok(state)
}

/// Run one pulse from |1⟩ and from |0⟩ with the default step count.
pub fn integrate_three_level(pulse: &PulseEnvelope, eta: f64) -> Result<PulseEvolution> {
    integrate_three_level_with_steps(pulse, eta, DEFAULT_STEPS)
}

pub fn integrate_three_level_with_steps(
    pulse: &PulseEnvelope,
    eta: f64,
    steps: usize,
) -> Result<PulseEvolution> {
    Ok(PulseEvolution {
        from_one: evolve(pulse, eta, ThreeLevelState::basis(1), steps)?,
        from_zero: evolve(pulse, eta, ThreeLevelState::basis(0), steps)?,
    })
}

/// First-order leakage amplitude from |1⟩ when the |1⟩ population stays put:
/// the Fourier transform of `-i√2 Ω(t)` at `eta`, by composite Simpson.
pub fn perturbative_leakage(pulse: &PulseEnvelope, eta: f64, intervals: usize) -> Complex64 {
    let n = intervals.max(2) & !1;
    let h = pulse.duration / n as f64;
    let start = -pulse.duration / 2.0;
    let integrand = |t: f64| {
        Complex64::new(0.0, -SQRT_2) * pulse.omega(t) * Complex64::from_polar(1.0, -eta * t)
    };
    let mut acc = integrand(start) + integrand(start + pulse.duration);
    for i in 1..n {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += weight * integrand(start + i as f64 * h);
    }
    acc * h / 3.0
}

/// Leakage magnitudes at one anharmonicity, plain and with DRAG.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakagePoint {
    pub eta: f64,
    pub plain_from_zero: f64,
    pub plain_from_one: f64,
    pub drag_from_zero: f64,
    pub drag_from_one: f64,
}

impl LeakagePoint {
    /// Worse of the two DRAG-to-plain ratios.
    pub fn suppression_ratio(&self) -> f64 {
        (self.drag_from_zero / self.plain_from_zero).max(self.drag_from_one / self.plain_from_one)
    }
}

/// Plain and DRAG leakage of `pulse` over an anharmonicity grid.
pub fn leakage_scan(
    pulse: &PulseEnvelope,
    etas: &[f64],
    steps: usize,
) -> Result<Vec<LeakagePoint>> {
    etas.par_iter()
        .map(|&eta| {
            let plain = integrate_three_level_with_steps(pulse, eta, steps)?;
            let drag = integrate_three_level_with_steps(&drag_envelope(pulse, eta), eta, steps)?;
            Ok(LeakagePoint {
                eta,
                plain_from_zero: plain.from_zero.leakage().norm(),
                plain_from_one: plain.from_one.leakage().norm(),
                drag_from_zero: drag.from_zero.leakage().norm(),
                drag_from_one: drag.from_one.leakage().norm(),
            })
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn power_law_exponent(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InsufficientData(
            "power-law fit needs two or more matched points".into(),
        ));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::InsufficientData(
            "power-law fit needs positive values".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|i| lo * (ratio * i as f64).exp()).collect()
}

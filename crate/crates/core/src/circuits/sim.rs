use super::records::{Basis, Prep};
use super::DdSequence;
use crate::gate_algebra::{build_two_qubit, GateParams};
use crate::linalg::{c, direct_sum, kron, Mat2, Mat4};
use crate::noise::{decohere_2q, noisy_pi_pulse, NoiseConfig, NoiseRealization};
use nalgebra::Vector4;
use std::f64::consts::FRAC_1_SQRT_2;

/// Pure-state density matrix of a preparation.
pub fn prepare(prep: Prep) -> Mat4 {
    let h = c(FRAC_1_SQRT_2, 0.0);
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    let psi = match prep {
        Prep::Plus0 => Vector4::new(h, o, h, o),
        Prep::ZeroPlus => Vector4::new(h, h, o, o),
        Prep::One0 => Vector4::new(o, o, l, o),
        Prep::Zero1 => Vector4::new(o, l, o, o),
        Prep::PlusOne => Vector4::new(o, h, o, h),
        Prep::OnePlus => Vector4::new(o, o, h, h),
    };
    psi * psi.adjoint()
}

/// Unitary applied before a computational-basis readout.
pub fn basis_change(basis: Basis) -> Mat4 {
    let s = FRAC_1_SQRT_2;
    let hadamard = Mat2::new(c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0));
    let s_dag = Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0));
    match basis {
        Basis::Computational => Mat4::identity(),
        Basis::Xx => kron(&hadamard, &hadamard),
        Basis::Yy => {
            let b = hadamard * s_dag;
            kron(&b, &b)
        }
        Basis::BellX => direct_sum(&Mat2::identity(), &hadamard),
        Basis::BellY => direct_sum(
            &Mat2::identity(),
            &Mat2::new(c(s, 0.0), c(0.0, -s), c(s, 0.0), c(0.0, s)),
        ),
    }
}

/// The gate as seen by one circuit instance, with quasi-static drift added.
pub(crate) fn drifted_gate(gate: &GateParams, drift: &NoiseRealization) -> Mat4 {
    let mut g = *gate;
    g.zeta += drift.zeta_offset;
    g.gamma += drift.gamma_offset;
    build_two_qubit(&g)
}

/// Decoupling layer for cycle `j`, including systematic pulse errors and an
/// optional frame rotation `(+j·rate, −j·rate)`.
pub(crate) fn dd_layer(
    dd: DdSequence,
    j: usize,
    noise: &NoiseConfig,
    tracking_rate: f64,
) -> Option<Mat4> {
    let (a, b) = dd.axes(j)?;
    let shift = j as f64 * tracking_rate;
    Some(kron(
        &noisy_pi_pulse(noise.mw_error_left, a + shift),
        &noisy_pi_pulse(noise.mw_error_right, b - shift),
    ))
}

/// `D_j · W` for one cycle.
pub fn cycle_unitary(
    gate: &Mat4,
    dd: DdSequence,
    j: usize,
    noise: &NoiseConfig,
    tracking_rate: f64,
) -> Mat4 {
    match dd_layer(dd, j, noise, tracking_rate) {
        Some(d) => d * gate,
        None => *gate,
    }
}

/// Runs `depth` cycles from `rho`, applying decoherence after every cycle.
pub(crate) fn evolve<F>(rho: &Mat4, depth: usize, noise: &NoiseConfig, mut cycle: F) -> Mat4
where
    F: FnMut(usize) -> Mat4,
{
    if !noise.has_decoherence() {
        let mut u = Mat4::identity();
        for j in 0..depth {
            u = cycle(j) * u;
        }
        return u * rho * u.adjoint();
    }
    let mut state = *rho;
    for j in 0..depth {
        let u = cycle(j);
        state = decohere_2q(&(u * state * u.adjoint()), noise.lambda1, noise.lambda2);
    }
    state
}

/// Outcome probabilities `[p00, p01, p10, p11]` after a basis change.
pub(crate) fn outcome_probabilities(rho: &Mat4, basis: Basis) -> [f64; 4] {
    let b = basis_change(basis);
    let rotated = b * rho * b.adjoint();
    let mut p = [0.0; 4];
    for (i, slot) in p.iter_mut().enumerate() {
        *slot = rotated[(i, i)].re;
    }
    p
}

/// `⟨Z⟩` of each qubit from four outcome frequencies.
pub(crate) fn single_qubit_z(freq: &[f64]) -> (f64, f64) {
    let left = freq[0] + freq[1] - freq[2] - freq[3];
    let right = freq[0] - freq[1] + freq[2] - freq[3];
    (left, right)
}

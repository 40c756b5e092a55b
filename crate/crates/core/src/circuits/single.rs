use super::family_id;
use crate::error::Result;
use crate::gate_algebra::{build_single_qubit, SingleQubitParams};
use crate::linalg::{c, su2_components, z_rot, Mat2, Pauli};
use crate::noise::{cell_rng, decohere_1q, draw_realization, observe, CellKey, NoiseConfig};

/// The two readout references `Φ(0)` and `Φ(π/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauBasis {
    Zero,
    HalfPi,
}

impl TauBasis {
    pub fn angle(self) -> f64 {
        match self {
            TauBasis::Zero => 0.0,
            TauBasis::HalfPi => std::f64::consts::FRAC_PI_2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleQubitRecord {
    pub z: f64,
    pub depth: usize,
    /// Probability of finding `Φ(0)`.
    pub p0: f64,
    /// Probability of finding `Φ(π/2)`.
    pub p_half: f64,
    /// Rabi angle of the reference cycle used to define `Φ(τ)`.
    pub reference_rabi: f64,
    pub counts: Option<[[u64; 2]; 2]>,
}

impl SingleQubitRecord {
    /// `(2P0 − 1) + i(2P_{π/2} − 1)`, ideally `e^{i(τ0 + 2nΩ)}`.
    pub fn signal(&self) -> crate::linalg::C64 {
        c(2.0 * self.p0 - 1.0, 2.0 * self.p_half - 1.0)
    }

    pub fn probability(&self, tau: TauBasis) -> f64 {
        match tau {
            TauBasis::Zero => self.p0,
            TauBasis::HalfPi => self.p_half,
        }
    }
}

/// Rotation axis `n̂` and Rabi angle `Ω` of `u = exp(−iΩ n̂·σ)`.
fn axis_and_angle(u: &Mat2) -> ([f64; 3], f64) {
    let (a0, a) = su2_components(u);
    let s = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    if s < 1e-14 {
        return ([1.0, 0.0, 0.0], 0.0);
    }
    ([a[0] / s, a[1] / s, a[2] / s], s.atan2(a0))
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = dot(v, v).sqrt();
    (n > 1e-9).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

/// Bloch vectors of `Φ(0)` and `Φ(π/2)`: the projection of `+Z` onto the
/// plane orthogonal to `n̂`, and its image after a quarter turn about `n̂`.
fn reference_frame(axis: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let project = |v: [f64; 3]| {
        let k = dot(v, axis);
        [v[0] - k * axis[0], v[1] - k * axis[1], v[2] - k * axis[2]]
    };
    let m0 = normalize(project([0.0, 0.0, 1.0]))
        .or_else(|| normalize(project([1.0, 0.0, 0.0])))
        .expect("axis is a unit vector");
    (m0, cross(axis, m0))
}

fn density_from_bloch(r: [f64; 3]) -> Mat2 {
    (Mat2::identity()
        + Pauli::X.matrix() * c(r[0], 0.0)
        + Pauli::Y.matrix() * c(r[1], 0.0)
        + Pauli::Z.matrix() * c(r[2], 0.0))
        * c(0.5, 0.0)
}

fn bloch_of(rho: &Mat2) -> [f64; 3] {
    [
        2.0 * rho[(1, 0)].re,
        2.0 * rho[(1, 0)].im,
        (rho[(0, 0)] - rho[(1, 1)]).re,
    ]
}

struct CycleFamily<'a> {
    noise: &'a NoiseConfig,
    realization: u64,
    family: u64,
}

impl CycleFamily<'_> {
    /// Runs `cycle(z, drift)` over depths and z offsets, referencing the
    /// readout to the axis of `reference(z)`.
    fn run<C, R>(
        &self,
        depths: &[usize],
        z_offsets: &[f64],
        cycle: C,
        reference: R,
    ) -> Result<Vec<SingleQubitRecord>>
    where
        C: Fn(f64, f64) -> Mat2,
        R: Fn(f64) -> Mat2,
    {
        self.noise.validate()?;
        let mut out = Vec::with_capacity(depths.len() * z_offsets.len());
        for (zi, &z) in z_offsets.iter().enumerate() {
            let (axis, reference_rabi) = axis_and_angle(&reference(z));
            let (m0, m_half) = reference_frame(axis);
            let circuit = (self.family << 8) | zi as u64;
            for &depth in depths {
                let drift = draw_realization(self.noise, self.realization, circuit, depth as u64);
                let u = cycle(z, drift.sq_phase_offsets[0]);
                let mut rho = density_from_bloch(m0);
                if self.noise.has_decoherence() {
                    for _ in 0..depth {
                        rho = decohere_1q(
                            &(u * rho * u.adjoint()),
                            self.noise.lambda1,
                            self.noise.lambda2,
                        );
                    }
                } else {
                    let un = crate::linalg::matrix_power2(&u, depth);
                    rho = un * rho * un.adjoint();
                }
                let r = bloch_of(&rho);
                let mut probs = [0.0; 2];
                let mut counts = [[0u64; 2]; 2];
                let mut sampled = false;
                for (ti, m) in [m0, m_half].into_iter().enumerate() {
                    let p = (0.5 * (1.0 + dot(r, m))).clamp(0.0, 1.0);
                    let mut rng = cell_rng(
                        self.noise.seed,
                        CellKey::new(self.realization, circuit, depth as u64, ti as u64),
                    );
                    let obs = observe(&[p, 1.0 - p], self.noise, self.noise.shots, &mut rng)?;
                    probs[ti] = obs.frequencies[0];
                    if let Some(k) = obs.counts {
                        counts[ti] = [k[0], k[1]];
                        sampled = true;
                    }
                }
                out.push(SingleQubitRecord {
                    z,
                    depth,
                    p0: probs[0],
                    p_half: probs[1],
                    reference_rabi,
                    counts: sampled.then_some(counts),
                });
            }
        }
        Ok(out)
    }
}

/// Repeats `Z(z)·R(μ, ζ, χ)` and records `P0` and `P_{π/2}` per depth and z.
/// `Φ(τ)` is defined from the eigenbasis of `Z(z)·R(reference)`; pass `None`
/// to use the true gate.
pub fn run_single_qubit_family(
    gate: &SingleQubitParams,
    reference: Option<&SingleQubitParams>,
    noise: &NoiseConfig,
    depths: &[usize],
    z_offsets: &[f64],
    realization: u64,
) -> Result<Vec<SingleQubitRecord>> {
    let g = build_single_qubit(gate);
    let r = build_single_qubit(reference.unwrap_or(gate));
    let family = CycleFamily {
        noise,
        realization,
        family: family_id::SINGLE,
    };
    family.run(
        depths,
        z_offsets,
        |z, drift| z_rot(z) * z_rot(drift) * g,
        |z| z_rot(z) * r,
    )
}

/// Interleaves `x_half` (nominally `X(−π/2)`) and `x_pi` (nominally `X(π)`)
/// with an idle phase `δ` after each pulse slot. A perfect π pulse echoes `δ`
/// away and the composite cycle carries `ζ = χ_{π/2} − χ_π`.
pub fn run_relative_axis_family(
    x_pi: &SingleQubitParams,
    x_half: &SingleQubitParams,
    noise: &NoiseConfig,
    depths: &[usize],
    z_offsets: &[f64],
    realization: u64,
) -> Result<Vec<SingleQubitRecord>> {
    let pi = build_single_qubit(x_pi);
    let half = build_single_qubit(x_half);
    let nominal = build_single_qubit(&SingleQubitParams::new(x_pi.mu, 0.0, 0.0))
        * build_single_qubit(&SingleQubitParams::new(x_half.mu, 0.0, 0.0));
    let family = CycleFamily {
        noise,
        realization,
        family: family_id::RELATIVE,
    };
    family.run(
        depths,
        z_offsets,
        |z, drift| z_rot(z) * z_rot(drift) * pi * z_rot(drift) * half,
        |z| z_rot(z) * nominal,
    )
}

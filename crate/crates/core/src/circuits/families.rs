use super::records::{Basis, DepthRecord, Observable, Prep, Qubit};
use super::sim::{
    cycle_unitary, drifted_gate, evolve, outcome_probabilities, prepare, single_qubit_z,
};
use super::{family_id, DdSequence, FamilyOptions};
use crate::error::{Error, Result};
use crate::gate_algebra::GateParams;
use crate::linalg::{c, Mat4};
use crate::noise::{cell_rng, draw_realization, observe, CellKey, NoiseConfig};
use serde::{Deserialize, Serialize};

/// Which decoupling axis the swap family interleaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SwapAxis {
    /// `X⊗X`: the cycle `C = (X⊗X)·W`.
    X,
    /// `Y⊗X`: the complementary cycle `C̄ = (Y⊗X)·W`.
    Y,
}

fn require_even(depths: &[usize]) -> Result<()> {
    match depths.iter().find(|d| *d % 2 == 1) {
        Some(&d) => Err(Error::OddDepth(d)),
        None => Ok(()),
    }
}

pub(crate) struct Runner<'a> {
    pub noise: &'a NoiseConfig,
    pub realization: u64,
    pub family: u64,
}

impl Runner<'_> {
    fn rng(&self, prep: Prep, depth: usize, basis: Basis) -> rand_chacha::ChaCha8Rng {
        cell_rng(
            self.noise.seed,
            CellKey::new(
                self.realization,
                (self.family << 8) | prep.index(),
                depth as u64,
                basis.index(),
            ),
        )
    }

    fn measure(
        &self,
        rho: &Mat4,
        prep: Prep,
        depth: usize,
        basis: Basis,
        record: &mut DepthRecord,
    ) -> Result<Vec<f64>> {
        let probs = outcome_probabilities(rho, basis);
        let mut rng = self.rng(prep, depth, basis);
        let obs = observe(&probs, self.noise, self.noise.shots, &mut rng)?;
        if let Some(counts) = obs.counts {
            record.counts.insert((prep, basis), counts);
        }
        Ok(obs.frequencies)
    }

    /// Per-qubit `⟨X⟩ + i⟨Y⟩` for each preparation, measured in the XX and
    /// YY settings.
    pub(crate) fn coherence_record<F>(
        &self,
        depth: usize,
        preps: &[Prep],
        mut evolve_prep: F,
    ) -> Result<DepthRecord>
    where
        F: FnMut(Prep) -> Mat4,
    {
        let mut record = DepthRecord::new(depth);
        for &prep in preps {
            let rho = evolve_prep(prep);
            let fx = self.measure(&rho, prep, depth, Basis::Xx, &mut record)?;
            let fy = self.measure(&rho, prep, depth, Basis::Yy, &mut record)?;
            let (lx, rx) = single_qubit_z(&fx);
            let (ly, ry) = single_qubit_z(&fy);
            record
                .complex_expectations
                .insert((prep, Observable::Coherence(Qubit::Left)), c(lx, ly));
            record
                .complex_expectations
                .insert((prep, Observable::Coherence(Qubit::Right)), c(rx, ry));
        }
        Ok(record)
    }

    /// Computational populations and odd-parity Bell expectations.
    fn bloch_record(
        &self,
        depth: usize,
        prep: Prep,
        rho: &Mat4,
        postselect: bool,
    ) -> Result<DepthRecord> {
        let mut record = DepthRecord::new(depth);
        let mut kept = 0.0;
        let settings = [
            (Basis::Computational, Observable::ZOdd),
            (Basis::BellX, Observable::XOdd),
            (Basis::BellY, Observable::YOdd),
        ];
        for (basis, obs) in settings {
            let f = self.measure(rho, prep, depth, basis, &mut record)?;
            let odd = f[1] + f[2];
            kept += odd / settings.len() as f64;
            let mut value = f[1] - f[2];
            if postselect {
                value = if odd > 0.0 { value / odd } else { 0.0 };
            }
            record.insert_real(prep, obs, value);
            if basis == Basis::Computational {
                record.populations.insert(prep, [f[0], f[1], f[2], f[3]]);
            }
        }
        record.parity_postselected_fraction = kept;
        Ok(record)
    }
}

fn tracking_rate(gate: &GateParams, opts: &FamilyOptions) -> f64 {
    if opts.phase_tracking {
        gate.zeta
    } else {
        0.0
    }
}

/// Gate interleaved with decoupling (`opts.dd`, `X⊗X` by default), prepared in
/// `|0+>` and `|+0>`. Each record's [`DepthRecord::matrix`] estimates
/// `e^{ikφ/2}·C_odd^k` at `k` cycles.
pub fn run_cphase_family(
    gate: &GateParams,
    noise: &NoiseConfig,
    depths: &[usize],
    opts: &FamilyOptions,
) -> Result<Vec<DepthRecord>> {
    require_even(depths)?;
    coherence_family(gate, noise, depths, opts.dd, opts, family_id::CPHASE)
}

/// The bare gate repeated `n` times, prepared in `|0+>` and `|+0>`.
/// [`DepthRecord::matrix`] estimates `e^{−inγ}·W_odd^n`.
pub fn run_floquet_family(
    gate: &GateParams,
    noise: &NoiseConfig,
    depths: &[usize],
    opts: &FamilyOptions,
) -> Result<Vec<DepthRecord>> {
    coherence_family(
        gate,
        noise,
        depths,
        DdSequence::None,
        opts,
        family_id::FLOQUET,
    )
}

fn coherence_family(
    gate: &GateParams,
    noise: &NoiseConfig,
    depths: &[usize],
    dd: DdSequence,
    opts: &FamilyOptions,
    family: u64,
) -> Result<Vec<DepthRecord>> {
    noise.validate()?;
    let runner = Runner {
        noise,
        realization: opts.realization,
        family,
    };
    let rate = tracking_rate(gate, opts);
    depths
        .iter()
        .map(|&depth| {
            let drift = draw_realization(noise, opts.realization, family, depth as u64);
            let w = drifted_gate(gate, &drift);
            runner.coherence_record(depth, &[Prep::ZeroPlus, Prep::Plus0], |prep| {
                evolve(&prepare(prep), depth, noise, |j| {
                    cycle_unitary(&w, dd, j, noise, rate)
                })
            })
        })
        .collect()
}

/// Swap-angle family: prepare `|01>` (or `|10>`), interleave `X⊗X` or `Y⊗X`, and read
/// out the odd-parity Bloch vector.
pub fn run_swap_family(
    gate: &GateParams,
    noise: &NoiseConfig,
    depths: &[usize],
    axis: SwapAxis,
    opts: &FamilyOptions,
) -> Result<Vec<DepthRecord>> {
    let dd = match axis {
        SwapAxis::X => DdSequence::Xx,
        SwapAxis::Y => DdSequence::Yx,
    };
    swap_family(gate, noise, depths, axis, dd, opts)
}

/// Parasitic-coupling family: a weak swap (`θ = theta_xtalk` per cycle,
/// azimuth `chi`, detuning phase `zeta`) under XY4 decoupling on both qubits
/// (`X⊗X`/`Y⊗Y`, or `Y⊗X`/`X⊗Y` for the complementary axis).
#[allow(clippy::too_many_arguments)]
pub fn run_crosstalk_family(
    theta_xtalk: f64,
    chi: f64,
    zeta: f64,
    noise: &NoiseConfig,
    depths: &[usize],
    axis: SwapAxis,
    opts: &FamilyOptions,
) -> Result<Vec<DepthRecord>> {
    let gate = GateParams::new(theta_xtalk, zeta, chi, 0.0, 0.0);
    let dd = match axis {
        SwapAxis::X => DdSequence::Xy4,
        SwapAxis::Y => DdSequence::ComplementaryXy4,
    };
    swap_family(&gate, noise, depths, axis, dd, opts)
}

fn swap_family(
    gate: &GateParams,
    noise: &NoiseConfig,
    depths: &[usize],
    axis: SwapAxis,
    dd: DdSequence,
    opts: &FamilyOptions,
) -> Result<Vec<DepthRecord>> {
    require_even(depths)?;
    noise.validate()?;
    if !matches!(opts.swap_prep, Prep::Zero1 | Prep::One0) {
        return Err(Error::config(
            "swap_prep",
            "the swap family starts from |01> or |10>",
        ));
    }
    let family = match axis {
        SwapAxis::X => family_id::SWAP_X,
        SwapAxis::Y => family_id::SWAP_Y,
    };
    let runner = Runner {
        noise,
        realization: opts.realization,
        family,
    };
    let rate = tracking_rate(gate, opts);
    depths
        .iter()
        .map(|&depth| {
            let drift = draw_realization(noise, opts.realization, family, depth as u64);
            let w = drifted_gate(gate, &drift);
            let rho = evolve(&prepare(opts.swap_prep), depth, noise, |j| {
                cycle_unitary(&w, dd, j, noise, rate)
            });
            runner.bloch_record(depth, opts.swap_prep, &rho, opts.postselect)
        })
        .collect()
}

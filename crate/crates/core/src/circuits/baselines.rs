use super::families::Runner;
use super::family_id;
use super::records::{DepthRecord, Prep};
use super::sim::{drifted_gate, evolve, prepare};
use crate::error::{Error, Result};
use crate::gate_algebra::GateParams;
use crate::linalg::{kron, z_rot, Mat2};
use crate::noise::{draw_realization, NoiseConfig};

const FOUR_PREPS: [Prep; 4] = [Prep::ZeroPlus, Prep::Plus0, Prep::PlusOne, Prep::OnePlus];

/// Depth-1 unitary tomography of the excitation-preserving matrix elements,
/// using `|00>` and `|11>` as phase references. Eight circuits: four
/// preparations, each read out in the XX and YY settings.
pub fn run_baseline_unitary_tomography(
    gate: &GateParams,
    noise: &NoiseConfig,
    realization: u64,
) -> Result<DepthRecord> {
    noise.validate()?;
    let runner = Runner {
        noise,
        realization,
        family: family_id::TOMOGRAPHY,
    };
    let drift = draw_realization(noise, realization, family_id::TOMOGRAPHY, 1);
    let w = drifted_gate(gate, &drift);
    runner.coherence_record(1, &FOUR_PREPS, |prep| {
        evolve(&prepare(prep), 1, noise, |_| w)
    })
}

/// Records of the phase-method baseline, one series per inserted Z phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMethodRecords {
    pub z_phases: Vec<f64>,
    pub series: Vec<Vec<DepthRecord>>,
}

/// Repeats `(Z(z)⊗I)·W` for each depth and each inserted phase `z`, recording
/// the odd-block matrices against both references. The eigenphase splitting
/// of the cycle grows as `2nΩ_z` with `cosΩ_z = cosθ·cos(ζ + z/2)`.
pub fn run_baseline_phase_method(
    gate: &GateParams,
    noise: &NoiseConfig,
    depths: &[usize],
    z_phases: &[f64],
    realization: u64,
) -> Result<PhaseMethodRecords> {
    noise.validate()?;
    if z_phases.len() < 2 {
        return Err(Error::InsufficientData(
            "the phase method needs at least two inserted Z phases".into(),
        ));
    }
    let mut series = Vec::with_capacity(z_phases.len());
    for (zi, &z) in z_phases.iter().enumerate() {
        let family = (family_id::PHASE_METHOD << 4) | zi as u64;
        let runner = Runner {
            noise,
            realization,
            family,
        };
        let z_layer = kron(&z_rot(z), &Mat2::identity());
        let records = depths
            .iter()
            .map(|&depth| {
                let drift = draw_realization(noise, realization, family, depth as u64);
                let cycle = z_layer * drifted_gate(gate, &drift);
                runner.coherence_record(depth, &FOUR_PREPS, |prep| {
                    evolve(&prepare(prep), depth, noise, |_| cycle)
                })
            })
            .collect::<Result<Vec<_>>>()?;
        series.push(records);
    }
    Ok(PhaseMethodRecords {
        z_phases: z_phases.to_vec(),
        series,
    })
}

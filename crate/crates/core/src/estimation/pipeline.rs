use super::cphase::estimate_phi;
use super::floquet::estimate_z_phases;
use super::swap::{estimate_theta_chi, SwapOptions};
use super::{names, EstimationResult};
use crate::circuits::{
    run_cphase_family, run_floquet_family, run_swap_family, FamilyOptions, SwapAxis,
};
use crate::error::Result;
use crate::gate_algebra::GateParams;
use crate::noise::NoiseConfig;
use serde::{Deserialize, Serialize};

/// Depths for the three MEADD families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeaddPlan {
    pub cphase_depths: Vec<usize>,
    pub swap_depths: Vec<usize>,
    pub floquet_depths: Vec<usize>,
}

impl Default for MeaddPlan {
    fn default() -> Self {
        MeaddPlan {
            cphase_depths: (1..=7).map(|k| 2 * k).collect(),
            swap_depths: (1..=7).map(|k| 2 * k).collect(),
            floquet_depths: (1..=8).collect(),
        }
    }
}

/// All five parameters: `φ` from the decoupled family, `θ` from the swap
/// families, `ζ` and `γ` from the bare gate given `θ̂`, and finally `χ`
/// with the swap axes oriented by `ζ̂`.
pub fn characterize(
    gate: &GateParams,
    noise: &NoiseConfig,
    plan: &MeaddPlan,
    opts: &FamilyOptions,
) -> Result<EstimationResult> {
    let cphase = run_cphase_family(gate, noise, &plan.cphase_depths, opts)?;
    let phi = estimate_phi(&cphase)?;

    let swap_x = run_swap_family(gate, noise, &plan.swap_depths, SwapAxis::X, opts)?;
    let swap_y = run_swap_family(gate, noise, &plan.swap_depths, SwapAxis::Y, opts)?;
    let unoriented = estimate_theta_chi(&swap_x, &swap_y, &SwapOptions::default())?;
    let theta = unoriented.get(names::THETA).unwrap_or(0.0);

    let floquet = run_floquet_family(gate, noise, &plan.floquet_depths, opts)?;
    let z_phases = estimate_z_phases(&floquet, theta)?;
    let swap = estimate_theta_chi(
        &swap_x,
        &swap_y,
        &SwapOptions {
            zeta_ref: z_phases.get(names::ZETA).unwrap_or(0.0),
            ..SwapOptions::default()
        },
    )?;
    Ok(phi.merge(swap).merge(z_phases))
}

use super::baselines::{estimate_phase_method, estimate_tomography};
use super::names;
use super::swap::{rotation_fit, theta_from_fits, SwapBranch};
use crate::circuits::{
    run_baseline_phase_method, run_baseline_unitary_tomography, run_swap_family, FamilyOptions,
    SwapAxis,
};
use crate::error::{Error, Result};
use crate::gate_algebra::GateParams;
use crate::noise::NoiseConfig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    Meadd,
    PhaseMethod,
    UnitaryTomography,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::Meadd => "meadd",
            Protocol::PhaseMethod => "phase-method",
            Protocol::UnitaryTomography => "unitary-tomography",
        }
    }
}

/// Budgets and depths of an SNR scan. The defaults spend 64,000 shots on
/// MEADD and 160,000 on each baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SnrConfig {
    pub chi: f64,
    pub realizations: usize,
    pub meadd_budget: u64,
    pub meadd_depths: Vec<usize>,
    pub phase_method_depths: Vec<usize>,
    pub phase_method_shots: u64,
    pub phase_method_z: Vec<f64>,
    /// Shots per tomography circuit. Each of the eight circuits stands for a
    /// pair of readout-flipped circuits, so this is twice the per-circuit
    /// count of a flipped design.
    pub tomography_shots: u64,
    /// Drift, pulse and decay settings shared by all protocols; its shot
    /// count and exact flag are overridden.
    pub noise: NoiseConfig,
}

impl Default for SnrConfig {
    fn default() -> Self {
        SnrConfig {
            chi: 0.3,
            realizations: 100,
            meadd_budget: 64_000,
            meadd_depths: (1..=7).map(|k| 2 * k).collect(),
            phase_method_depths: vec![1, 2, 4, 8],
            phase_method_shots: 2_500,
            phase_method_z: vec![0.0, PI],
            tomography_shots: 20_000,
            noise: NoiseConfig::default(),
        }
    }
}

impl SnrConfig {
    /// Shots per MEADD circuit: the budget split over depths, two decoupling
    /// axes and three readout settings.
    pub fn meadd_shots_per_circuit(&self) -> u64 {
        self.meadd_budget / (6 * self.meadd_depths.len() as u64).max(1)
    }

    /// Total measurements one realization of `protocol` consumes.
    pub fn budget(&self, protocol: Protocol) -> u64 {
        match protocol {
            Protocol::Meadd => self.meadd_shots_per_circuit() * 6 * self.meadd_depths.len() as u64,
            Protocol::PhaseMethod => {
                self.phase_method_shots
                    * 8
                    * (self.phase_method_depths.len() * self.phase_method_z.len()) as u64
            }
            Protocol::UnitaryTomography => self.tomography_shots * 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrRow {
    pub protocol: Protocol,
    pub theta: f64,
    pub zeta: f64,
    /// `|θ| / std(θ̂)` over realizations.
    pub snr: f64,
    pub mean: f64,
    pub std: f64,
    pub realizations: usize,
}

fn estimate_once(
    protocol: Protocol,
    gate: &GateParams,
    cfg: &SnrConfig,
    realization: u64,
) -> Result<f64> {
    let mut noise = cfg.noise.clone();
    noise.exact = false;
    match protocol {
        Protocol::Meadd => {
            noise.shots = cfg.meadd_shots_per_circuit();
            let opts = FamilyOptions {
                realization,
                ..FamilyOptions::default()
            };
            let x = run_swap_family(gate, &noise, &cfg.meadd_depths, SwapAxis::X, &opts)?;
            let y = run_swap_family(gate, &noise, &cfg.meadd_depths, SwapAxis::Y, &opts)?;
            Ok(theta_from_fits(&rotation_fit(&x)?, &rotation_fit(&y)?, SwapBranch::Exact).0)
        }
        Protocol::PhaseMethod => {
            noise.shots = cfg.phase_method_shots;
            let records = run_baseline_phase_method(
                gate,
                &noise,
                &cfg.phase_method_depths,
                &cfg.phase_method_z,
                realization,
            )?;
            Ok(estimate_phase_method(&records)?
                .get(names::THETA)
                .unwrap_or(f64::NAN))
        }
        Protocol::UnitaryTomography => {
            noise.shots = cfg.tomography_shots;
            let record = run_baseline_unitary_tomography(gate, &noise, realization)?;
            Ok(estimate_tomography(&record)?
                .get(names::THETA)
                .unwrap_or(f64::NAN))
        }
    }
}

/// SNR of the swap-angle estimate at each `(θ, ζ)` grid point.
///
/// Realizations run in parallel; every (grid point, realization) pair owns
/// its random streams, so the table does not depend on the thread count.
pub fn snr_scan(protocol: Protocol, grid: &[(f64, f64)], cfg: &SnrConfig) -> Result<Vec<SnrRow>> {
    if cfg.realizations < 2 {
        return Err(Error::config(
            "realizations",
            "need at least two realizations for a spread",
        ));
    }
    cfg.noise.validate()?;
    let jobs: Vec<(usize, u64)> = (0..grid.len())
        .flat_map(|g| (0..cfg.realizations as u64).map(move |r| (g, r)))
        .collect();
    let estimates: Vec<f64> = jobs
        .par_iter()
        .map(|&(g, r)| {
            let (theta, zeta) = grid[g];
            let gate = GateParams::new(theta, zeta, cfg.chi, PI, 0.0);
            estimate_once(protocol, &gate, cfg, ((g as u64) << 32) | r)
        })
        .collect::<Result<_>>()?;

    Ok(grid
        .iter()
        .enumerate()
        .map(|(g, &(theta, zeta))| {
            let chunk = &estimates[g * cfg.realizations..(g + 1) * cfg.realizations];
            let n = chunk.len() as f64;
            let mean = chunk.iter().sum::<f64>() / n;
            let var = chunk.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let std = var.sqrt();
            SnrRow {
                protocol,
                theta,
                zeta,
                snr: theta.abs() / std,
                mean,
                std,
                realizations: cfg.realizations,
            }
        })
        .collect())
}

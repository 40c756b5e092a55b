//! From depth records to gate parameters.
//!
//! Every estimator reduces its records to one or more [`PhaseSeries`], fits a
//! line through the unwrapped phases and inverts the slope. Intercepts soak
//! up preparation and readout errors, so only the slopes carry parameters.

mod baselines;
mod cphase;
mod floquet;
mod phase;
mod pipeline;
mod single;
mod snr;
mod swap;
mod variance;

pub use baselines::{estimate_phase_method, estimate_tomography};
pub use cphase::{determinant_phase_series, estimate_phi, DET_FLOOR};
pub use floquet::estimate_z_phases;
pub use phase::{
    fit_linear_phase, fit_linear_phase_demodulated, unwrap_phases, LinearPhaseFit, PhaseSeries,
    UNWRAP_MARGIN,
};
pub use pipeline::{characterize, MeaddPlan};
pub use single::estimate_single_qubit;
pub use snr::{snr_scan, Protocol, SnrConfig, SnrRow};
pub use swap::{
    estimate_theta_chi, rotation_fit, theta_from_fits, RotationFit, SwapBranch, SwapOptions,
};
pub use variance::{
    optimal_depth_from_scan, phase_outcome_probability, simulate_phase_estimates,
    simulate_swap_estimates, swap_outcome_probability, variance_bound, VarianceMode,
};

use std::collections::BTreeMap;

/// Keys used in [`EstimationResult::estimates`].
pub mod names {
    pub const THETA: &str = "theta";
    pub const ZETA: &str = "zeta";
    pub const CHI: &str = "chi";
    pub const PHI: &str = "phi";
    pub const GAMMA: &str = "gamma";
    pub const MU: &str = "mu";
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    /// Smallest distance from `π` of any unwrapped increment.
    pub unwrap_margin: f64,
    /// Per-cycle decay rate of the fitted contrast (`|det|` or Bloch length).
    pub contrast_decay_rate: f64,
    /// Parameters reported but not determined by the data (for example the
    /// azimuth of a vanishing swap).
    pub indefinite: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EstimationResult {
    pub estimates: BTreeMap<String, f64>,
    pub std_errors: BTreeMap<String, f64>,
    /// Largest RMS residual among the underlying phase fits.
    pub fit_residual_rms: f64,
    pub diagnostics: Diagnostics,
}

impl EstimationResult {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.estimates.get(name).copied()
    }

    pub fn std_error(&self, name: &str) -> Option<f64> {
        self.std_errors.get(name).copied()
    }

    pub fn is_indefinite(&self, name: &str) -> bool {
        self.diagnostics.indefinite.iter().any(|n| n == name)
    }

    pub(crate) fn set(&mut self, name: &str, value: f64, std_error: f64) {
        self.estimates.insert(name.to_string(), value);
        self.std_errors.insert(name.to_string(), std_error.abs());
    }

    /// Merges another result, keeping the worse of the shared diagnostics.
    pub fn merge(mut self, other: EstimationResult) -> EstimationResult {
        self.estimates.extend(other.estimates);
        self.std_errors.extend(other.std_errors);
        self.fit_residual_rms = self.fit_residual_rms.max(other.fit_residual_rms);
        self.diagnostics.unwrap_margin = self
            .diagnostics
            .unwrap_margin
            .min(other.diagnostics.unwrap_margin);
        self.diagnostics
            .indefinite
            .extend(other.diagnostics.indefinite);
        self
    }
}

fn log_decay_rate(depths: &[usize], magnitudes: &[f64]) -> f64 {
    let x: Vec<f64> = depths.iter().map(|&d| d as f64).collect();
    let y: Vec<f64> = magnitudes.iter().map(|m| m.max(1e-300).ln()).collect();
    if x.len() < 2 {
        return 0.0;
    }
    -phase::weighted_line(&x, &y, &vec![1.0; x.len()]).slope
}

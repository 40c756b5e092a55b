use crate::circuits::DdSequence;
use crate::error::{Error, Result};
use crate::estimation::{Protocol, SnrConfig};
use crate::gate_algebra::{GateParams, SingleQubitParams};
use crate::noise::NoiseConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

/// One experiment, read from TOML.
///
/// ```toml
/// name = "fig6"
/// seed = 6
///
/// [experiment]
/// kind = "cphase"
/// depths = [2, 4, 6]
///
/// [[expect]]
/// metric = "phi_error@0.1"
/// max = 1e-3
/// ```
///
/// The top-level `seed` replaces the seed of every noise table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub experiment: Experiment,
    #[serde(default)]
    pub expect: Vec<Expectation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Experiment {
    Cphase(CphaseSpec),
    Swap(SwapSpec),
    Floquet(FloquetSpec),
    SingleQubit(SingleQubitSpec),
    RelativeAxis(RelativeAxisSpec),
    Crosstalk(CrosstalkSpec),
    SnrScan(SnrScanSpec),
    Robustness(RobustnessSpec),
    Drag(DragSpec),
    VarianceBound(VarianceBoundSpec),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Cphase(_) => "cphase",
            Experiment::Swap(_) => "swap",
            Experiment::Floquet(_) => "floquet",
            Experiment::SingleQubit(_) => "single_qubit",
            Experiment::RelativeAxis(_) => "relative_axis",
            Experiment::Crosstalk(_) => "crosstalk",
            Experiment::SnrScan(_) => "snr_scan",
            Experiment::Robustness(_) => "robustness",
            Experiment::Drag(_) => "drag",
            Experiment::VarianceBound(_) => "variance_bound",
        }
    }
}

fn one() -> usize {
    1
}

fn zero_list() -> Vec<f64> {
    vec![0.0]
}

/// Decoupled controlled-phase family, optionally swept over systematic
/// over-rotation of the decoupling pulses (fractions of π).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CphaseSpec {
    pub gate: GateParams,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub dd: DdSequence,
    pub depths: Vec<usize>,
    #[serde(default = "zero_list")]
    pub over_rotations: Vec<f64>,
    #[serde(default = "one")]
    pub realizations: usize,
    /// Apply the over-rotation to both qubits' pulses, not just the left.
    #[serde(default)]
    pub both_qubits: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwapSpec {
    pub gate: GateParams,
    #[serde(default)]
    pub noise: NoiseConfig,
    pub depths: Vec<usize>,
    #[serde(default = "one")]
    pub realizations: usize,
    #[serde(default)]
    pub small_angle_branch: bool,
    /// Detuning phase used to orient the swap axes.
    #[serde(default)]
    pub zeta_ref: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FloquetSpec {
    pub gate: GateParams,
    #[serde(default)]
    pub noise: NoiseConfig,
    pub depths: Vec<usize>,
    #[serde(default = "one")]
    pub realizations: usize,
    /// Prior swap angle; the true one when absent.
    #[serde(default)]
    pub theta_hat: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleQubitSpec {
    pub gate: SingleQubitParams,
    /// Readout reference; the true gate when absent.
    #[serde(default)]
    pub reference: Option<SingleQubitParams>,
    #[serde(default)]
    pub noise: NoiseConfig,
    pub depths: Vec<usize>,
    pub z_offsets: Vec<f64>,
    #[serde(default = "one")]
    pub realizations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelativeAxisSpec {
    pub x_pi: SingleQubitParams,
    pub x_half: SingleQubitParams,
    #[serde(default)]
    pub noise: NoiseConfig,
    pub depths: Vec<usize>,
    pub z_offsets: Vec<f64>,
    #[serde(default = "one")]
    pub realizations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrosstalkSpec {
    /// Parasitic swap angle per cycle.
    pub theta: f64,
    #[serde(default)]
    pub chi: f64,
    #[serde(default)]
    pub zeta: f64,
    #[serde(default)]
    pub noise: NoiseConfig,
    pub depths: Vec<usize>,
    #[serde(default = "one")]
    pub realizations: usize,
}

/// SNR over a `(θ, ζ = ratio·θ)` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnrScanSpec {
    pub protocols: Vec<Protocol>,
    pub thetas: Vec<f64>,
    pub zeta_ratios: Vec<f64>,
    #[serde(default)]
    pub settings: SnrConfig,
}

impl SnrScanSpec {
    pub fn grid(&self) -> Vec<(f64, f64)> {
        self.thetas
            .iter()
            .flat_map(|&t| self.zeta_ratios.iter().map(move |&r| (t, r * t)))
            .collect()
    }
}

/// A gate given by name (`identity`, `cz`, `iswap`, `sqrt-iswap`) or by
/// parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GateSpec {
    Named(String),
    Params(GateParams),
}

impl GateSpec {
    pub fn resolve(&self) -> Result<GateParams> {
        match self {
            GateSpec::Params(p) => Ok(*p),
            GateSpec::Named(name) => named_gate(name)
                .ok_or_else(|| Error::config("gate", format!("unknown gate `{name}`"))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            GateSpec::Named(name) => name.clone(),
            GateSpec::Params(p) => format!(
                "theta={};zeta={};chi={};phi={};gamma={}",
                p.theta, p.zeta, p.chi, p.phi, p.gamma
            ),
        }
    }
}

pub fn named_gate(name: &str) -> Option<GateParams> {
    match name.to_ascii_lowercase().as_str() {
        "identity" | "id" => Some(GateParams::identity()),
        "cz" => Some(GateParams::cz()),
        "iswap" => Some(GateParams::iswap()),
        "sqrt-iswap" | "sqrt_iswap" | "sqiswap" => Some(GateParams::sqrt_iswap()),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustnessCase {
    pub gate: GateSpec,
    pub dd: DdSequence,
    #[serde(default)]
    pub alternating_idle: bool,
    #[serde(default)]
    pub include_symmetric_xy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustnessSpec {
    pub cases: Vec<RobustnessCase>,
}

fn pi() -> f64 {
    std::f64::consts::PI
}

fn default_steps() -> usize {
    crate::pulses::DEFAULT_STEPS
}

/// Leakage scan over a geometric grid of `ηT`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DragSpec {
    pub eta_min: f64,
    pub eta_max: f64,
    pub points: usize,
    #[serde(default = "pi")]
    pub amplitude: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

/// Monte Carlo check of the decoherence-limited variance: repeated
/// single-qubit runs at `n*`, and a two-qubit depth scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarianceBoundSpec {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Shots per quadrature.
    pub shots: u64,
    /// Phase per cycle of the single-qubit experiment.
    pub phi: f64,
    pub repeats: usize,
    pub trials: usize,
    /// Swap angle per cycle of the two-qubit scan.
    pub theta: f64,
    pub scan_depths: Vec<usize>,
    pub scan_trials: usize,
}

/// A bound on one summary metric; `--check` fails the run when violated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub metric: String,
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
}

impl Expectation {
    pub fn holds(&self, value: f64) -> bool {
        value.is_finite()
            && self.min.is_none_or(|m| value >= m)
            && self.max.is_none_or(|m| value <= m)
    }

    pub fn describe(&self) -> String {
        match (self.min, self.max) {
            (Some(lo), Some(hi)) => format!("[{lo}, {hi}]"),
            (Some(lo), None) => format!(">= {lo}"),
            (None, Some(hi)) => format!("<= {hi}"),
            (None, None) => "any".into(),
        }
    }
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    pub exact: bool,
}

fn require_depths(field: &str, depths: &[usize]) -> Result<()> {
    if depths.is_empty() {
        return Err(Error::config(field, "depth list is empty"));
    }
    if depths.contains(&0) {
        return Err(Error::config(field, "depths must be positive"));
    }
    Ok(())
}

fn require_positive(field: &str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::config(field, "must be at least one"));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| text[..s.start].lines().count().to_string())
                .map(|line| format!("line {line}"))
                .unwrap_or_else(|| "config".into());
            Error::config(field, e.message().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("path", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn hash(&self) -> String {
        Sha256::digest(self.to_toml().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::config(
                "name",
                "must be a plain, non-empty file stem",
            ));
        }
        match &self.experiment {
            Experiment::Cphase(s) => {
                require_depths("experiment.depths", &s.depths)?;
                require_positive("experiment.realizations", s.realizations)?;
                if s.over_rotations.is_empty() {
                    return Err(Error::config("experiment.over_rotations", "list is empty"));
                }
                s.noise.validate()
            }
            Experiment::Swap(s) => {
                require_depths("experiment.depths", &s.depths)?;
                require_positive("experiment.realizations", s.realizations)?;
                s.noise.validate()
            }
            Experiment::Floquet(s) => {
                require_depths("experiment.depths", &s.depths)?;
                require_positive("experiment.realizations", s.realizations)?;
                s.noise.validate()
            }
            Experiment::SingleQubit(s) => {
                require_depths("experiment.depths", &s.depths)?;
                require_positive("experiment.realizations", s.realizations)?;
                if s.z_offsets.len() < 2 {
                    return Err(Error::config(
                        "experiment.z_offsets",
                        "need at least two offsets",
                    ));
                }
                s.noise.validate()
            }
            Experiment::RelativeAxis(s) => {
                require_depths("experiment.depths", &s.depths)?;
                require_positive("experiment.realizations", s.realizations)?;
                if s.z_offsets.len() < 2 {
                    return Err(Error::config(
                        "experiment.z_offsets",
                        "need at least two offsets",
                    ));
                }
                s.noise.validate()
            }
            Experiment::Crosstalk(s) => {
                require_depths("experiment.depths", &s.depths)?;
                require_positive("experiment.realizations", s.realizations)?;
                s.noise.validate()
            }
            Experiment::SnrScan(s) => {
                if s.protocols.is_empty() {
                    return Err(Error::config("experiment.protocols", "list is empty"));
                }
                if s.thetas.is_empty() || s.zeta_ratios.is_empty() {
                    return Err(Error::config("experiment.thetas", "grid is empty"));
                }
                require_depths("experiment.settings.meadd_depths", &s.settings.meadd_depths)?;
                require_depths(
                    "experiment.settings.phase_method_depths",
                    &s.settings.phase_method_depths,
                )?;
                if s.settings.realizations < 2 {
                    return Err(Error::config(
                        "experiment.settings.realizations",
                        "need at least two",
                    ));
                }
                s.settings.noise.validate()
            }
            Experiment::Robustness(s) => {
                if s.cases.is_empty() {
                    return Err(Error::config("experiment.cases", "list is empty"));
                }
                for case in &s.cases {
                    case.gate.resolve()?;
                }
                Ok(())
            }
            Experiment::Drag(s) => {
                if !(s.eta_min > 0.0 && s.eta_max > s.eta_min) {
                    return Err(Error::config(
                        "experiment.eta_min",
                        "need 0 < eta_min < eta_max",
                    ));
                }
                if s.points < 2 {
                    return Err(Error::config(
                        "experiment.points",
                        "need at least two points",
                    ));
                }
                require_positive("experiment.steps", s.steps)
            }
            Experiment::VarianceBound(s) => {
                require_depths("experiment.scan_depths", &s.scan_depths)?;
                require_positive("experiment.repeats", s.repeats)?;
                require_positive("experiment.trials", s.trials)?;
                require_positive("experiment.scan_trials", s.scan_trials)?;
                if s.shots == 0 {
                    return Err(Error::config("experiment.shots", "must be at least one"));
                }
                if !(s.lambda1 >= 0.0 && s.lambda2 >= 0.0 && s.lambda1 + s.lambda2 > 0.0) {
                    return Err(Error::config(
                        "experiment.lambda1",
                        "need non-negative rates with a positive sum",
                    ));
                }
                Ok(())
            }
        }
    }

    /// Applies CLI overrides and propagates the seed into every noise table.
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        let seed = self.seed;
        let tune = |noise: &mut NoiseConfig| {
            noise.seed = seed;
            if let Some(shots) = o.shots {
                noise.shots = shots;
            }
            if o.exact {
                noise.exact = true;
            }
        };
        match &mut self.experiment {
            Experiment::Cphase(s) => tune(&mut s.noise),
            Experiment::Swap(s) => tune(&mut s.noise),
            Experiment::Floquet(s) => tune(&mut s.noise),
            Experiment::SingleQubit(s) => tune(&mut s.noise),
            Experiment::RelativeAxis(s) => tune(&mut s.noise),
            Experiment::Crosstalk(s) => tune(&mut s.noise),
            Experiment::SnrScan(s) => tune(&mut s.settings.noise),
            Experiment::VarianceBound(s) => {
                if let Some(shots) = o.shots {
                    s.shots = shots;
                }
            }
            Experiment::Robustness(_) | Experiment::Drag(_) => {}
        }
    }
}

/// Preset configs shipped with the crate.
pub const PRESETS: [(&str, &str); 4] = [
    ("fig5", include_str!("../../presets/fig5.toml")),
    ("fig6", include_str!("../../presets/fig6.toml")),
    ("appendixF", include_str!("../../presets/appendixF.toml")),
    (
        "robustness-table",
        include_str!("../../presets/robustness-table.toml"),
    ),
];

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let text = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            let known: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            Error::config(
                "preset",
                format!("unknown preset `{name}` (known: {})", known.join(", ")),
            )
        })?;
    ExperimentConfig::from_toml(text)
}

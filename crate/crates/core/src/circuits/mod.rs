//! Circuit families for the characterization protocols and the small
//! density-matrix simulator that executes them.
//!
//! Every family returns one [`DepthRecord`] per requested depth. Depths count
//! gate repetitions (cycles). Families with interleaved decoupling require an
//! even depth so that the decoupling layers compose to the identity.

mod baselines;
mod families;
mod records;
mod sim;
mod single;

pub use baselines::{
    run_baseline_phase_method, run_baseline_unitary_tomography, PhaseMethodRecords,
};
pub use families::{
    run_cphase_family, run_crosstalk_family, run_floquet_family, run_swap_family, SwapAxis,
};
pub use records::{Basis, DepthRecord, Observable, Prep, Qubit};
pub use sim::{basis_change, cycle_unitary, prepare};
pub use single::{run_relative_axis_family, run_single_qubit_family, SingleQubitRecord, TauBasis};

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Decoupling layer applied after every gate repetition. Axis angles are
/// equatorial: `0` is X and `π/2` is Y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DdSequence {
    /// No decoupling.
    None,
    /// `X⊗X` every cycle.
    #[default]
    Xx,
    /// `Y⊗X` every cycle (complementary cycle).
    Yx,
    /// `X⊗Y` every cycle.
    Xy,
    /// `Y⊗Y` every cycle.
    Yy,
    /// `X⊗X`, `Y⊗Y` alternating.
    Xy4,
    /// `Y⊗X`, `X⊗Y` alternating.
    ComplementaryXy4,
}

impl DdSequence {
    /// `(left, right)` pulse axes for cycle `j`, or `None` without decoupling.
    pub fn axes(self, j: usize) -> Option<(f64, f64)> {
        let (x, y) = (0.0, FRAC_PI_2);
        let even = j % 2 == 0;
        match self {
            DdSequence::None => None,
            DdSequence::Xx => Some((x, x)),
            DdSequence::Yx => Some((y, x)),
            DdSequence::Xy => Some((x, y)),
            DdSequence::Yy => Some((y, y)),
            DdSequence::Xy4 => Some(if even { (x, x) } else { (y, y) }),
            DdSequence::ComplementaryXy4 => Some(if even { (y, x) } else { (x, y) }),
        }
    }

    pub fn period(self) -> usize {
        match self {
            DdSequence::Xy4 | DdSequence::ComplementaryXy4 => 2,
            _ => 1,
        }
    }

    pub fn parse(name: &str) -> Option<DdSequence> {
        match name.to_ascii_lowercase().as_str() {
            "none" => Some(DdSequence::None),
            "xx" => Some(DdSequence::Xx),
            "yx" => Some(DdSequence::Yx),
            "xy" => Some(DdSequence::Xy),
            "yy" => Some(DdSequence::Yy),
            "xy4" => Some(DdSequence::Xy4),
            "complementary-xy4" | "cxy4" => Some(DdSequence::ComplementaryXy4),
            _ => None,
        }
    }
}

/// Execution options shared by the two-qubit families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyOptions {
    /// Decoupling for the controlled-phase family. The swap and crosstalk
    /// families choose their layer from the requested axis.
    pub dd: DdSequence,
    /// Index of the noise realization; selects drift draws and shot streams.
    pub realization: u64,
    /// Divide odd-parity Bell expectations by the odd-parity population.
    pub postselect: bool,
    /// Advance the decoupling pulse phases by `±j·ζ` on cycle `j`, as a
    /// software frame that tracks the gate's Z phase would. This is a test
    /// mode: it breaks swap-element amplification.
    pub phase_tracking: bool,
    /// Initial state of the swap families, `|01>` or `|10>`.
    pub swap_prep: Prep,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions {
            dd: DdSequence::Xx,
            realization: 0,
            postselect: false,
            phase_tracking: false,
            swap_prep: Prep::Zero1,
        }
    }
}

impl FamilyOptions {
    pub fn with_dd(dd: DdSequence) -> Self {
        FamilyOptions {
            dd,
            ..FamilyOptions::default()
        }
    }

    pub fn realization(mut self, r: u64) -> Self {
        self.realization = r;
        self
    }
}

/// Stream identifiers for each family, combined with prep and basis indices.
pub(crate) mod family_id {
    pub const CPHASE: u64 = 1;
    pub const SWAP_X: u64 = 2;
    pub const SWAP_Y: u64 = 3;
    pub const FLOQUET: u64 = 4;
    pub const SINGLE: u64 = 5;
    pub const RELATIVE: u64 = 6;
    pub const TOMOGRAPHY: u64 = 7;
    pub const PHASE_METHOD: u64 = 8;
}

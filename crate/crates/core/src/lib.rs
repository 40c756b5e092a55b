//! Gate-characterization workbench built around matrix-element amplification
//! with dynamical decoupling (MEADD).
//!
//! The crate simulates the characterization circuits on a one- or two-qubit
//! density-matrix simulator, turns the resulting depth records into gate
//! parameter estimates, and compares against unitary tomography and a
//! phase-method baseline. Robustness of decoupled cycles is analysed in the
//! adjoint representation, and a three-level integrator checks DRAG pulses.
//!
//! Module map:
//!
//! - [`gate_algebra`]: gate matrices, parity and KAK decompositions.
//! - [`noise`]: drift, microwave and decoherence errors, shot sampling.
//! - [`circuits`]: the circuit families and the simulator that runs them.
//! - [`estimation`]: phase fits, parameter inversion, SNR and variance tools.
//! - [`robustness`]: adjoint blocks, twirl sums, cancellation checks.
//! - [`pulses`]: envelopes, DRAG, three-level leakage.
//! - [`harness`]: configuration, sweeps, result tables and the CLI.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuits;
pub mod error;
pub mod estimation;
pub mod gate_algebra;
pub mod harness;
pub mod linalg;
pub mod noise;
pub mod pulses;
pub mod robustness;

pub use error::{Error, Result};
pub use gate_algebra::{GateParams, SingleQubitParams};

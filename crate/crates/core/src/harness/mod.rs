//! Config-driven experiment runs, result tables and plot data.

mod config;
mod plot;
mod run;
mod table;

pub use config::*;
pub use plot::{emit_plot_data, PLOT_KINDS};
pub use run::{run, run_with, CheckOutcome, RunOutput};
pub use table::{write_atomic, Column, ResultTable, Value, TOOL_VERSION};

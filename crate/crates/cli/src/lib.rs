//! Configuration-driven experiment runner for the `sideinfo` workbench.
//!
//! A JSON [`ExperimentConfig`] names a model, a command and its parameters;
//! [`run_experiment`] turns it into [`ResultRow`]s and [`emit_report`] writes
//! them as CSV.

pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod verify;

pub use config::{Command, ExperimentConfig, ModelSpec, Params};
pub use error::{CliError, Result};
pub use report::{emit_report, format_real, to_csv_string, Metric, ResultRow, HEADER};
pub use run::{run_experiment, run_with_workers};

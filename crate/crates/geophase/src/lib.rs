//! Command-line experiment runner for the `geophase-core` models: config
//! resolution, experiment drivers and deterministic CSV/JSON output.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

pub use config::{Experiment, ExperimentConfig, Override};
pub use error::RunError;
pub use experiments::{compute, execute, run, RunOutput};

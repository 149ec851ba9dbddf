//! Command-line driver for the randomized Navier–Stokes toolkit: config
//! parsing, binary checkpoints and the experiment runners.

pub mod checkpoint;
pub mod config;
pub mod error;
pub mod experiments;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CheckpointError};
pub use config::{parse_config, parse_config_str, DataConfig, Experiment, ExperimentConfig};
pub use error::{CliError, Result};
pub use experiments::{run_experiment, run_experiment_with_threads, RunOutcome};

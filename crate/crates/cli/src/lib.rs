//! Configuration, ensemble runner and result tables behind the `qwalk`
//! command-line tool.

pub mod config;
pub mod error;
pub mod runner;
pub mod table;

pub use config::{ExperimentConfig, Format, Lattice, Observable, Overrides};
pub use error::{Category, CliError, Result};
pub use runner::{
    run_experiment, run_experiment_with_workers, run_oracle, workers_from_env, WORKERS_ENV,
};
pub use table::{ResultTable, Row};

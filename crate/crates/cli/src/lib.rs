//! Experiment harness for dynamic-feature MinHash: builds baseline sketches,
//! applies insertion or deletion workloads along several update paths, and
//! reports RMSE and wall-clock timings.

pub mod config;
pub mod error;
pub mod experiment;
pub mod report;
pub mod uniformity;
pub mod workload;

pub use config::{DataSource, ExperimentConfig, Mode, UpdatePath};
pub use error::{CliError, Result};
pub use experiment::{run_deletion_experiment, run_insertion_experiment};
pub use report::{emit_report, ExperimentReport, Format};

//! Command-line harness around `moduli-core`: configuration, representation
//! files, runs and their reports.

pub mod config;
pub mod repfile;
pub mod report;
pub mod run;

pub use config::{ConfigError, ExperimentConfig};
pub use report::{read_report, write_report, Report, Status};

//! Experiment harness for the nanomagnet reservoir: configuration files,
//! train/test runs, and CSV and weight-file output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod report;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, ExperimentOutput, ResultRow};

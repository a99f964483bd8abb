//! Experiment harness for `ledg-core`: declarative JSON configs, sweep
//! runners and deterministic CSV/JSON output.

// `!(a > b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod error;
pub mod experiments;
pub mod output;

pub use config::{Experiment, ExperimentConfig};
pub use error::LabError;
pub use experiments::{compute, run, RunOptions};
pub use output::Artifacts;

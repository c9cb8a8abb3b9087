//! Command-line laboratory for `toral-core`: TOML experiment configs,
//! JSON/CSV/JSONL reports and the parallel flagship pipeline.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod flagship;
pub mod report;

pub use error::{LabError, LabResult, EXIT_CONFIG, EXIT_INVARIANT, EXIT_OK};

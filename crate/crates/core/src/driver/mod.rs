//! Adaptive loop, problem catalog, configuration and outputs.

mod catalog;
mod config;
mod output;
mod run;

pub use catalog::{ProblemId, SUBDOMAINS};
pub use config::{ConfigError, ConfigFile, DriverConfig, KEYS};
pub use output::{csv_string, emit_outputs, svg_string, Emitted, CSV_HEADER};
pub use run::{iteration_error_oracle, run, ConvergenceRecord, ReferenceKind, RunOptions, RunOutput};

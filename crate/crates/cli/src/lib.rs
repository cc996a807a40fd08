//! Config-driven runner for the splitkit solvers: parse a JSON run config,
//! validate it, run one solver and export a CSV trace plus a JSON summary.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod build;
pub mod config;
pub mod run;
pub mod validate;

use std::io;

use splitkit::SolveError;
use thiserror::Error;

pub use config::RunConfig;
pub use run::{execute, run, Overrides, RunReport, RunStatus};
pub use validate::{validate, Finding};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config field {field}: {message}")]
    Config { field: String, message: String },
    #[error("invalid config: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Finding>),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Solve(#[from] SolveError),
}

impl CliError {
    /// 3 when the iteration diverged, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Solve(e) if e.is_divergence() => 3,
            _ => 1,
        }
    }
}

//! Run configuration: one JSON document per run.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    SplitFeasibility,
    ThreeObjective,
    MultiReg,
    MatrixCompletion,
    Qp,
    Admm3,
    AdmmM,
    SlowExample,
}

impl ProblemKind {
    pub fn is_admm(self) -> bool {
        matches!(self, Self::Admm3 | Self::AdmmM)
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub kind: ProblemKind,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Basic,
    Accelerated,
    Linesearch,
    PrimalDual,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    #[default]
    None,
    Uniform,
    Weighted,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum AccelBranchConfig {
    #[default]
    Cocoercive,
    Lipschitz,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub variant: Variant,
    pub gamma: Option<f64>,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    pub epsilon: Option<f64>,
    pub eta: Option<f64>,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub averaging: Averaging,
    /// Dual stepsize of the primal-dual variant; without it the equivalent
    /// form with `σ = 1/γ` runs.
    pub sigma: Option<f64>,
    #[serde(default)]
    pub branch: AccelBranchConfig,
}

fn default_lambda() -> f64 {
    1.0
}

fn default_max_iter() -> usize {
    100_000
}

fn default_tol() -> f64 {
    1e-10
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_trace")]
    pub trace_path: String,
    #[serde(default = "default_summary")]
    pub summary_path: String,
    /// Fill the `elapsed_s` trace column. Off by default so that repeated
    /// runs give identical files.
    #[serde(default)]
    pub record_timing: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            trace_path: default_trace(),
            summary_path: default_summary(),
            record_timing: false,
        }
    }
}

fn default_trace() -> String {
    "trace.csv".into()
}

fn default_summary() -> String {
    "summary.json".into()
}

impl RunConfig {
    /// Parses a config document; errors name the offending field path.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let mut de = serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let field = e.path().to_string();
            CliError::Config {
                field: if field == "." { "config".into() } else { field },
                message: e.inner().to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config {
            field: "config".into(),
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::from_json(&text)
    }
}

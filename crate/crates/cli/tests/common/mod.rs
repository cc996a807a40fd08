//! Config fixtures shared by the CLI tests and the acceptance target.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_splitkit");

/// Scalar `|x|/2 + ι_{[−0.2, 0.2]} + ½(x − 1)²`; converges quickly.
pub const MINIMAL: &str = r#"{
  "problem": {"kind": "three_objective", "params": {"f": {"type": "l1", "weight": 0.5}, "g": {"type": "box", "lower": [-0.2], "upper": [0.2]}, "target": [1.0], "reference": [0.2]}},
  "solver": {"gamma": 1.0, "max_iter": 1000, "tol": 1e-10},
  "output": {"trace_path": "trace.csv", "summary_path": "summary.json"},
  "seed": 1
}"#;

/// A randomly generated problem, so the seed matters.
pub const SEEDED: &str = r#"{
  "problem": {"kind": "qp", "params": {"dim": 6, "c1": {"type": "simplex"}}},
  "solver": {"gamma": 0.5, "max_iter": 2000, "tol": 1e-12, "averaging": "uniform"},
  "output": {"trace_path": "trace.csv", "summary_path": "summary.json"},
  "seed": 42
}"#;

pub const SLOW: &str = r#"{
  "problem": {"kind": "slow_example", "params": {"a": 0.0, "n_blocks": 50, "horizon": 200}},
  "solver": {"gamma": 1.0, "max_iter": 200, "tol": 1e-12},
  "output": {"trace_path": "trace.csv", "summary_path": "summary.json"}
}"#;

const SCALAR_PROBLEM: &str =
    r#""problem": {"kind": "three_objective", "params": {"target": [1.0], "f": {"type": "nonneg"}}}"#;

fn scalar(solver: &str) -> String {
    format!("{{{SCALAR_PROBLEM}, \"solver\": {solver}}}")
}

/// Configs that must be rejected, each with a short label.
pub fn invalid_configs() -> Vec<(&'static str, String)> {
    vec![
        ("missing gamma", scalar("{}")),
        ("gamma at 2 beta", scalar(r#"{"gamma": 2.0}"#)),
        ("gamma above bound", scalar(r#"{"gamma": 5.0}"#)),
        ("negative gamma", scalar(r#"{"gamma": -1.0}"#)),
        ("lambda above 1/alpha", scalar(r#"{"gamma": 1.0, "lambda": 2.5}"#)),
        ("zero lambda", scalar(r#"{"gamma": 1.0, "lambda": 0.0}"#)),
        ("epsilon outside (0,1)", scalar(r#"{"gamma": 1.0, "epsilon": 1.5}"#)),
        ("eta outside (0,1)", scalar(r#"{"gamma": 0.5, "variant": "accelerated", "eta": 0.0}"#)),
        ("zero max_iter", scalar(r#"{"gamma": 1.0, "max_iter": 0}"#)),
        ("negative tol", scalar(r#"{"gamma": 1.0, "tol": -1e-3}"#)),
        ("unknown solver field", scalar(r#"{"gama": 1.0}"#)),
        ("unknown variant", scalar(r#"{"gamma": 1.0, "variant": "fista"}"#)),
        ("lipschitz branch without strong B", scalar(r#"{"gamma": 0.5, "variant": "accelerated", "branch": "lipschitz"}"#)),
        ("cocoercive gamma too large", scalar(r#"{"gamma": 1.5, "variant": "accelerated", "eta": 0.5}"#)),
        ("averaging with accelerated", scalar(r#"{"gamma": 0.5, "variant": "accelerated", "averaging": "uniform"}"#)),
        ("relaxed linesearch", scalar(r#"{"gamma": 1.0, "variant": "linesearch", "lambda": 0.5}"#)),
        ("sigma without primal_dual", scalar(r#"{"gamma": 1.0, "sigma": 1.0}"#)),
        ("nonpositive sigma", scalar(r#"{"gamma": 1.0, "variant": "primal_dual", "sigma": -2.0}"#)),
        (
            "unknown problem kind",
            r#"{"problem": {"kind": "lasso", "params": {}}, "solver": {"gamma": 1.0}}"#.into(),
        ),
        (
            "unknown problem parameter",
            r#"{"problem": {"kind": "qp", "params": {"dimm": 3}}, "solver": {"gamma": 0.1}}"#.into(),
        ),
        (
            "unknown term type",
            r#"{"problem": {"kind": "three_objective", "params": {"f": {"type": "huber"}}}, "solver": {"gamma": 0.1}}"#.into(),
        ),
        (
            "box bounds reversed",
            r#"{"problem": {"kind": "three_objective", "params": {"f": {"type": "box", "lower": [1.0], "upper": [0.0]}, "dim": 1}}, "solver": {"gamma": 0.1}}"#.into(),
        ),
        (
            "feasibility gamma against norm of L",
            r#"{"problem": {"kind": "split_feasibility", "params": {"c1": {"type": "nonneg"}, "c2": {"type": "nonneg"}, "c3": {"type": "nonneg"}, "l": [[2.0]]}}, "solver": {"gamma": 0.6}}"#.into(),
        ),
        (
            "admm gamma too large",
            r#"{"problem": {"kind": "admm3", "params": {}}, "solver": {"gamma": 100.0}}"#.into(),
        ),
        (
            "admm relaxed",
            r#"{"problem": {"kind": "admm_m", "params": {}}, "solver": {"gamma": 0.01, "lambda": 0.5}}"#.into(),
        ),
        (
            "multi_reg accelerated",
            r#"{"problem": {"kind": "multi_reg", "params": {"regs": [{"type": "nonneg"}], "dim": 2}}, "solver": {"gamma": 0.5, "variant": "accelerated"}}"#.into(),
        ),
        (
            "slow example off unit stepsize",
            r#"{"problem": {"kind": "slow_example", "params": {}}, "solver": {"gamma": 0.5}}"#.into(),
        ),
        (
            "preconditioning with a nonlinear set",
            r#"{"problem": {"kind": "qp", "params": {"dim": 3, "c2": {"type": "simplex"}, "precondition": true}}, "solver": {"gamma": 0.1}}"#.into(),
        ),
        ("malformed document", r#"{"problem": {"kind": "qp""#.into()),
    ]
}

pub fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).expect("write config");
    path
}

pub fn splitkit(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn splitkit")
}

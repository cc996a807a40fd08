//! Static checks of a config, run before any iteration.

use std::fmt;

use serde::Serialize;
use splitkit::splitting::RelaxationSchedule;
use splitkit::variants::{AccelConfig, DEFAULT_ETA};

use crate::build::{build, Built};
use crate::config::{AccelBranchConfig, Averaging, ProblemKind, RunConfig, Variant};
use crate::CliError;

/// One violated requirement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

struct Findings(Vec<Finding>);

impl Findings {
    fn push(&mut self, field: &str, message: impl Into<String>) {
        self.0.push(Finding {
            field: field.into(),
            message: message.into(),
        });
    }
}

fn in_open_unit(v: f64) -> bool {
    v > 0.0 && v < 1.0
}

/// Every violation found in `config`, in field order; empty when the config
/// can be run.
pub fn validate(config: &RunConfig) -> Vec<Finding> {
    let mut out = Findings(Vec::new());
    let s = &config.solver;
    let kind = config.problem.kind;
    let gamma = match s.gamma {
        None => {
            out.push("solver.gamma", "missing: a stepsize gamma is required");
            None
        }
        Some(g) if !(g > 0.0 && g.is_finite()) => {
            out.push("solver.gamma", format!("must be positive and finite, got {g}"));
            None
        }
        Some(g) => Some(g),
    };
    if !(s.lambda > 0.0 && s.lambda.is_finite()) {
        out.push("solver.lambda", format!("must be positive, got {}", s.lambda));
    }
    if let Some(e) = s.epsilon.filter(|e| !in_open_unit(*e)) {
        out.push("solver.epsilon", format!("must lie in (0, 1), got {e}"));
    }
    if let Some(e) = s.eta.filter(|e| !in_open_unit(*e)) {
        out.push("solver.eta", format!("must lie in (0, 1), got {e}"));
    }
    if s.max_iter == 0 {
        out.push("solver.max_iter", "must be at least 1");
    }
    if !(s.tol >= 0.0 && s.tol.is_finite()) {
        out.push("solver.tol", format!("must be finite and nonnegative, got {}", s.tol));
    }
    if let Some(sigma) = s.sigma {
        if s.variant != Variant::PrimalDual {
            out.push("solver.sigma", "only used by the primal_dual variant");
        } else if !(sigma > 0.0 && sigma.is_finite()) {
            out.push("solver.sigma", format!("must be positive, got {sigma}"));
        }
    }
    if s.averaging != Averaging::None && s.variant != Variant::Basic {
        out.push("solver.averaging", "averaging is available for the basic variant only");
    }
    if (kind.is_admm() || kind == ProblemKind::MultiReg) && s.variant != Variant::Basic {
        out.push("solver.variant", format!("{kind:?} runs with the basic variant only"));
    }
    if (kind.is_admm() || kind == ProblemKind::MultiReg) && s.averaging != Averaging::None {
        out.push("solver.averaging", format!("{kind:?} has no averaging"));
    }
    if s.variant != Variant::Basic && s.lambda != 1.0 && !kind.is_admm() {
        out.push("solver.lambda", "only the basic variant is relaxed; lambda must be 1");
    }
    if kind == ProblemKind::SlowExample && (s.gamma != Some(1.0) || s.lambda != 1.0) {
        out.push("solver.gamma", "the slow example is built for gamma = 1 and lambda = 1");
    }
    if kind.is_admm() && s.lambda != 1.0 {
        out.push("solver.lambda", "ADMM runs unrelaxed; lambda must be 1");
    }
    let built = match build(&config.problem, gamma.unwrap_or(1.0), config.seed) {
        Ok(b) => b,
        Err(CliError::Config { field, message }) => {
            out.push(&field, message);
            return out.0;
        }
        Err(e) => {
            out.push("problem", e.to_string());
            return out.0;
        }
    };
    let Some(g) = gamma else {
        return out.0;
    };
    let beta = match built.beta() {
        Ok(b) => b,
        Err(e) => {
            out.push("problem", e.to_string());
            return out.0;
        }
    };
    let check_basic = |out: &mut Findings, beta: f64| {
        let eps = s
            .epsilon
            .unwrap_or_else(|| RelaxationSchedule::default_epsilon(g, beta));
        if !(g < 2.0 * beta * eps) {
            out.push(
                "solver.gamma",
                format!("gamma must be < 2·beta·epsilon (gamma = {g}, beta = {beta}, epsilon = {eps})"),
            );
        }
        let upper = 2.0 - eps;
        if s.lambda >= upper {
            out.push(
                "solver.lambda",
                format!("lambda must lie in (0, 1/alpha) = (0, {upper})"),
            );
        }
    };
    match (&built, s.variant) {
        (Built::Admm { .. }, _) => {
            if !(g < beta) {
                out.push("solver.gamma", format!("gamma must be < 2/rho = {beta}"));
            }
        }
        (Built::MultiReg { .. }, _) => check_basic(&mut out, beta),
        (Built::ThreeOp { .. }, Variant::Basic) => check_basic(&mut out, beta),
        (Built::ThreeOp { problem, .. }, Variant::Accelerated) => {
            let cfg = match s.branch {
                AccelBranchConfig::Cocoercive => AccelConfig::cocoercive(g, s.eta.unwrap_or(DEFAULT_ETA)),
                AccelBranchConfig::Lipschitz => AccelConfig::lipschitz(g),
            };
            if s.branch == AccelBranchConfig::Lipschitz && !(problem.b.mu() > 0.0) {
                out.push(
                    "solver.branch",
                    format!(
                        "Suppose that μ_B > 0: the lipschitz branch needs B strongly monotone, got mu_B = {}",
                        problem.b.mu()
                    ),
                );
            } else if let Err(e) = cfg.validate(problem) {
                out.push("solver.gamma", e.to_string());
            }
        }
        (Built::ThreeOp { .. }, Variant::Linesearch) => {}
        (Built::ThreeOp { .. }, Variant::PrimalDual) => {
            if s.sigma.is_none() {
                check_basic(&mut out, beta);
            }
        }
    }
    out.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> RunConfig {
        RunConfig::from_json(text).unwrap()
    }

    const SCALAR: &str = r#"{"problem": {"kind": "three_objective", "params": {"target": [1.0], "f": {"type": "nonneg"}}}, "solver": {"gamma": 1.0}}"#;

    #[test]
    fn valid_config_has_no_findings() {
        assert!(validate(&cfg(SCALAR)).is_empty());
    }

    #[test]
    fn boundary_stepsize_is_reported() {
        let c = cfg(&SCALAR.replace("\"gamma\": 1.0", "\"gamma\": 2.0"));
        let f = validate(&c);
        assert_eq!(f.len(), 1);
        assert!(f[0].message.contains("gamma must be < 2·beta·epsilon"), "{f:?}");
    }

    #[test]
    fn lipschitz_branch_needs_strong_monotonicity() {
        let c = cfg(&SCALAR.replace(
            "\"gamma\": 1.0",
            "\"gamma\": 0.5, \"variant\": \"accelerated\", \"branch\": \"lipschitz\"",
        ));
        let f = validate(&c);
        assert!(f.iter().any(|x| x.message.contains("Suppose that μ_B > 0")), "{f:?}");
    }

    #[test]
    fn missing_gamma_named() {
        let c = cfg(r#"{"problem": {"kind": "qp", "params": {"dim": 2}}, "solver": {}}"#);
        assert_eq!(validate(&c)[0].field, "solver.gamma");
    }
}

//! Executes a validated config and writes its trace and summary.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};
use splitkit::admm::{solve_admm3, solve_admm_m, AdmmOutcome};
use splitkit::applications::{solve_multi_reg, solve_primal_dual, PrimalDualConfig};
use splitkit::numkit::RealVector;
use splitkit::splitting::{
    apply_t, solve_basic_observed, write_trace_csv, Lambdas, RelaxationSchedule, Status, StopRule,
    ThreeOperatorProblem, TraceRecord,
};
use splitkit::variants::{
    solve_accelerated, solve_linesearch, AccelConfig, AveragingMode, ErgodicAccumulator, DEFAULT_ETA,
};
use splitkit::SolveError;

use crate::build::{build, Built};
use crate::config::{AccelBranchConfig, Averaging, ProblemKind, RunConfig, Variant};
use crate::validate::validate;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    MaxIterations,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Converged => 0,
            Self::MaxIterations => 2,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Self::Converged => "converged",
            Self::MaxIterations => "max_iterations",
        }
    }
}

impl From<Status> for RunStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Converged => Self::Converged,
            Status::MaxIterations => Self::MaxIterations,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub status: RunStatus,
    pub trace: Vec<TraceRecord>,
    pub summary: Value,
}

/// Command-line overrides of config fields.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, config: &mut RunConfig) {
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(m) = self.max_iter {
            config.solver.max_iter = m;
        }
        if let Some(t) = self.tol {
            config.solver.tol = t;
        }
    }
}

/// Point estimate plus what can be said about it.
struct Final {
    x: RealVector,
    status: Status,
    trace: Vec<TraceRecord>,
    extra: Value,
}

fn point_report(problem: &ThreeOperatorProblem, x: &RealVector) -> (Option<f64>, Option<f64>) {
    (
        problem.objective.as_ref().map(|o| o.value(x)),
        problem.reference_solution.as_ref().map(|r| r.dist(x)),
    )
}

fn admm_trace(out: &AdmmOutcome, gamma: f64) -> Vec<TraceRecord> {
    out.trace
        .iter()
        .map(|r| TraceRecord {
            k: r.k,
            fpr_sq: r.dual_change * r.dual_change,
            objective: Some(r.objective),
            dist_ref: None,
            gamma_k: gamma,
            lambda_k: 1.0,
            elapsed_s: 0.0,
        })
        .collect()
}

fn run_three_op(
    config: &RunConfig,
    problem: &ThreeOperatorProblem,
    z0: &RealVector,
    gamma: f64,
) -> Result<Final, CliError> {
    let s = &config.solver;
    let stop = StopRule::new(s.max_iter, s.tol);
    let to_final = |out: splitkit::splitting::SolveOutcome, extra: Value| Final {
        x: out.state.x_b.clone(),
        status: out.status,
        trace: out.trace,
        extra,
    };
    Ok(match s.variant {
        Variant::Basic => {
            let eps = s
                .epsilon
                .unwrap_or_else(|| RelaxationSchedule::default_epsilon(gamma, problem.beta()));
            let schedule = RelaxationSchedule::new(gamma, eps, Lambdas::Constant(s.lambda))?;
            let mode = match s.averaging {
                Averaging::None => None,
                Averaging::Uniform => Some(AveragingMode::Uniform),
                Averaging::Weighted => Some(AveragingMode::Weighted),
            };
            let mut acc = mode.map(|m| ErgodicAccumulator::new(m, problem.dim()));
            let mut acc_err: Option<SolveError> = None;
            let out = solve_basic_observed(problem, &schedule, z0, stop, |st, lam| {
                if let Some(a) = acc.as_mut() {
                    if let Err(e) = a.update(st, lam) {
                        acc_err.get_or_insert(e);
                    }
                }
            })?;
            if let Some(e) = acc_err {
                return Err(e.into());
            }
            let averaged = match acc.as_ref().and_then(|a| a.average_b()) {
                Some(avg) => {
                    let (objective, dist_ref) = point_report(problem, &avg);
                    json!({"mode": format!("{:?}", s.averaging).to_lowercase(), "objective": objective, "dist_ref": dist_ref})
                }
                None => Value::Null,
            };
            to_final(out, json!({"averaged": averaged}))
        }
        Variant::Accelerated => {
            let cfg = match s.branch {
                AccelBranchConfig::Cocoercive => AccelConfig::cocoercive(gamma, s.eta.unwrap_or(DEFAULT_ETA)),
                AccelBranchConfig::Lipschitz => AccelConfig::lipschitz(gamma),
            };
            to_final(solve_accelerated(problem, cfg, z0, stop)?, Value::Null)
        }
        Variant::Linesearch => {
            let out = solve_linesearch(problem, gamma, z0, stop)?;
            let rho_min = out.rhos.iter().cloned().fold(1.0, f64::min);
            to_final(out.outcome, json!({"rho_min": rho_min}))
        }
        Variant::PrimalDual => {
            let start = apply_t(problem, gamma, z0)?;
            let cfg = match s.sigma {
                Some(sigma) => PrimalDualConfig::fbs_pd(gamma, sigma),
                None => PrimalDualConfig::equivalent_form(gamma),
            };
            let out = solve_primal_dual(problem, cfg, &start.x_b, &start.u_a, stop)?;
            Final {
                x: out.last().x.clone(),
                status: out.status,
                trace: out.trace,
                extra: json!({"sigma": cfg.sigma}),
            }
        }
    })
}

/// Validates and runs `config` without touching the file system.
pub fn execute(config: &RunConfig) -> Result<RunReport, CliError> {
    let findings = validate(config);
    if !findings.is_empty() {
        return Err(CliError::Invalid(findings));
    }
    let s = &config.solver;
    let gamma = s.gamma.ok_or(CliError::Config {
        field: "solver.gamma".into(),
        message: "missing".into(),
    })?;
    let stop = StopRule::new(s.max_iter, s.tol);
    let start = Instant::now();
    let built = build(&config.problem, gamma, config.seed)?;
    let (status, trace, result) = match &built {
        Built::ThreeOp { problem, z0 } => {
            let f = run_three_op(config, problem, z0, gamma)?;
            let (objective, dist_ref) = point_report(problem, &f.x);
            let result = json!({
                "objective": objective,
                "dist_ref": dist_ref,
                "details": f.extra,
            });
            (f.status, f.trace, result)
        }
        Built::MultiReg { spec, z0s } => {
            let out = solve_multi_reg(spec, gamma, Lambdas::Constant(s.lambda), z0s, stop)?;
            let objective = spec.objective.as_ref().map(|f| f(&out.x));
            (out.status, out.trace, json!({"objective": objective, "dist_ref": null}))
        }
        Built::Admm { problem, w0, xm0 } => {
            let out = if config.problem.kind == ProblemKind::Admm3 {
                solve_admm3(problem, w0, xm0, stop)?
            } else {
                solve_admm_m(problem, w0, xm0, stop)?
            };
            let residual = problem.constraint_residual(&out.blocks)?.norm();
            let result = json!({
                "objective": problem.objective(&out.blocks),
                "dist_ref": null,
                "details": {"constraint_residual": residual},
            });
            (out.status, admm_trace(&out, gamma), result)
        }
    };
    let status = RunStatus::from(status);
    let last = trace.last();
    let mut result = result;
    result["status"] = json!(status.label());
    result["iterations"] = json!(trace.len());
    result["final_fpr_sq"] = json!(last.map(|r| r.fpr_sq));
    result["wall_time_s"] = json!(start.elapsed().as_secs_f64());
    let summary = json!({"config": config, "result": result});
    Ok(RunReport { status, trace, summary })
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, bytes).map_err(io)
}

/// Runs `config` and writes the trace and summary below `out_dir`
/// (relative output paths are resolved against it).
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<RunReport, CliError> {
    let report = execute(config)?;
    let mut csv = Vec::new();
    write_trace_csv(&mut csv, &report.trace, config.output.record_timing).expect("writing to memory");
    write_file(&resolve(out_dir, &config.output.trace_path), &csv)?;
    let mut summary = serde_json::to_vec_pretty(&report.summary).expect("summary is plain json");
    summary.push(b'\n');
    write_file(&resolve(out_dir, &config.output.summary_path), &summary)?;
    Ok(report)
}

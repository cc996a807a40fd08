//! Turns `problem.params` into solver inputs.

use serde::de::DeserializeOwned;
use serde::Deserialize;
use splitkit::admm::{AdmmProblem, ArgminOracle};
use splitkit::applications::{
    split_feasibility_problem, synthetic_low_rank, CompletionSpec, MultiReg, QpSpec, ThreeObjective,
};
use splitkit::corpus::{random_matrix, random_spd, random_vector, rng, CorpusRng};
use splitkit::diagnostics::{build_slow_example, ThetaSpec};
use splitkit::numkit::{DenseMatrix, RealVector};
use splitkit::operators::{
    grad_quadratic, project_box, project_halfspace, project_hyperplane, project_simplex, prox_l1, prox_scaled_sq,
    ProxOperator,
};
use splitkit::splitting::{Objective, ThreeOperatorProblem, ValueFn};
use splitkit::SolveError;
use std::sync::Arc;

use crate::config::{ProblemConfig, ProblemKind};
use crate::CliError;

/// A set or regularizer entering through its projection or prox. JSON has no
/// infinities, so `null` box bounds mean unbounded.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TermSpec {
    /// The zero function, or equivalently the whole space.
    #[default]
    Zero,
    Box {
        lower: Vec<Option<f64>>,
        upper: Vec<Option<f64>>,
    },
    Nonneg,
    Simplex,
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    Hyperplane {
        normal: Vec<f64>,
        offset: f64,
    },
    L1 {
        weight: f64,
    },
    SquaredNorm {
        weight: f64,
    },
}

impl TermSpec {
    fn operator(&self) -> Result<ProxOperator, SolveError> {
        let unbounded =
            |b: &[Option<f64>], inf: f64| RealVector::from(b.iter().map(|v| v.unwrap_or(inf)).collect::<Vec<_>>());
        Ok(match self {
            Self::Zero => ProxOperator::zero(),
            Self::Box { lower, upper } => {
                project_box(unbounded(lower, f64::NEG_INFINITY), unbounded(upper, f64::INFINITY))?
            }
            Self::Nonneg => project_box(RealVector::from(&[0.0][..]), RealVector::from(&[f64::INFINITY][..]))?,
            Self::Simplex => project_simplex(),
            Self::Halfspace { normal, offset } => project_halfspace(RealVector::from(normal.clone()), *offset)?,
            Self::Hyperplane { normal, offset } => project_hyperplane(RealVector::from(normal.clone()), *offset)?,
            Self::L1 { weight } => prox_l1(*weight)?,
            Self::SquaredNorm { weight } => prox_scaled_sq(*weight),
        })
    }

    /// Function value; indicators count as zero since the iterates they are
    /// evaluated at lie in their sets.
    fn value(&self) -> ValueFn {
        match *self {
            Self::L1 { weight } => Arc::new(move |x: &RealVector| weight * x.iter().map(|v| v.abs()).sum::<f64>()),
            Self::SquaredNorm { weight } => Arc::new(move |x: &RealVector| 0.5 * weight * x.norm_sq()),
            _ => Arc::new(|_: &RealVector| 0.0),
        }
    }
}

/// Solver inputs built from a config.
#[derive(Clone, Debug)]
pub enum Built {
    ThreeOp {
        problem: ThreeOperatorProblem,
        z0: RealVector,
    },
    MultiReg {
        spec: MultiReg,
        z0s: Vec<RealVector>,
    },
    Admm {
        problem: AdmmProblem,
        w0: RealVector,
        xm0: RealVector,
    },
}

impl Built {
    /// The cocoercivity constant the stepsize is checked against; for ADMM
    /// the stepsize bound itself.
    pub fn beta(&self) -> Result<f64, SolveError> {
        match self {
            Self::ThreeOp { problem, .. } => Ok(problem.beta()),
            Self::MultiReg { spec, .. } => Ok(spec.regs.len() as f64 * spec.forward_beta()),
            Self::Admm { problem, .. } => problem.stepsize_bound(),
        }
    }
}

fn params<T: DeserializeOwned>(p: &ProblemConfig) -> Result<T, CliError> {
    let value = serde_json::Value::Object(p.params.clone());
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config {
            field: if path == "." {
                "problem.params".into()
            } else {
                format!("problem.params.{path}")
            },
            message: e.inner().to_string(),
        }
    })
}

fn param_error(field: &str, err: impl std::fmt::Display) -> CliError {
    CliError::Config {
        field: format!("problem.params.{field}"),
        message: err.to_string(),
    }
}

fn matrix(rows: &[Vec<f64>], field: &str) -> Result<DenseMatrix, CliError> {
    DenseMatrix::from_rows(rows).map_err(|e| param_error(field, e))
}

fn vector_or(
    v: Option<Vec<f64>>,
    dim: usize,
    field: &str,
    fallback: impl FnOnce() -> RealVector,
) -> Result<RealVector, CliError> {
    match v {
        Some(v) if v.len() != dim => Err(param_error(field, format!("expected length {dim}, got {}", v.len()))),
        Some(v) => Ok(RealVector::from(v)),
        None => Ok(fallback()),
    }
}

struct LinearModelParams {
    dim: Option<usize>,
    l: Option<Vec<Vec<f64>>>,
    target: Option<Vec<f64>>,
    reference: Option<Vec<f64>>,
    z0: Option<Vec<f64>>,
}

struct LinearModel {
    l: DenseMatrix,
    target: RealVector,
    reference: Option<RealVector>,
    z0: RealVector,
}

/// `h = ½‖Lx − target‖²`; `L` defaults to the identity and `target` to a
/// seeded random vector.
fn linear_model(p: LinearModelParams, rng: &mut CorpusRng) -> Result<LinearModel, CliError> {
    let l = match (&p.l, p.dim) {
        (Some(rows), _) => matrix(rows, "l")?,
        (None, Some(d)) => DenseMatrix::identity(d),
        (None, None) => match &p.target {
            Some(t) => DenseMatrix::identity(t.len()),
            None => return Err(param_error("dim", "missing: give dim, l or target")),
        },
    };
    if l.rows() == 0 || l.cols() == 0 {
        return Err(param_error("dim", "must be positive"));
    }
    if let Some(d) = p.dim {
        if d != l.cols() {
            return Err(param_error("dim", format!("l has {} columns", l.cols())));
        }
    }
    let target = vector_or(p.target, l.rows(), "target", || random_vector(rng, l.rows(), 1.0))?;
    let reference = p
        .reference
        .map(|r| vector_or(Some(r), l.cols(), "reference", || unreachable!()))
        .transpose()?;
    let z0 = vector_or(p.z0, l.cols(), "z0", || RealVector::zeros(l.cols()))?;
    Ok(LinearModel {
        l,
        target,
        reference,
        z0,
    })
}

fn h_value(l: &DenseMatrix, target: &RealVector) -> ValueFn {
    let (l, t) = (l.clone(), target.clone());
    Arc::new(move |x: &RealVector| 0.5 * l.mul_vec(x).map(|lx| lx.dist_sq(&t)).unwrap_or(f64::NAN))
}

fn half_sq_grad(target: &RealVector) -> Result<splitkit::operators::ForwardOperator, SolveError> {
    Ok(grad_quadratic(DenseMatrix::identity(target.dim()), -target, 1.0)?)
}

fn term(spec: &TermSpec, field: &str) -> Result<ProxOperator, CliError> {
    spec.operator().map_err(|e| param_error(field, e))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ThreeObjectiveParams {
    #[serde(default)]
    f: TermSpec,
    #[serde(default)]
    g: TermSpec,
    dim: Option<usize>,
    l: Option<Vec<Vec<f64>>>,
    target: Option<Vec<f64>>,
    reference: Option<Vec<f64>>,
    z0: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FeasibilityParams {
    #[serde(default)]
    c1: TermSpec,
    #[serde(default)]
    c2: TermSpec,
    #[serde(default)]
    c3: TermSpec,
    dim: Option<usize>,
    l: Option<Vec<Vec<f64>>>,
    z0: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MultiRegParams {
    regs: Vec<TermSpec>,
    dim: Option<usize>,
    l: Option<Vec<Vec<f64>>>,
    target: Option<Vec<f64>>,
    z0: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CompletionParams {
    rows: usize,
    cols: usize,
    #[serde(default = "default_rank")]
    rank: usize,
    #[serde(default = "default_fraction")]
    fraction: f64,
    #[serde(default)]
    mu: f64,
    lower: Option<f64>,
    upper: Option<f64>,
}

fn default_rank() -> usize {
    2
}

fn default_fraction() -> f64 {
    0.6
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QpParams {
    dim: Option<usize>,
    q: Option<Vec<Vec<f64>>>,
    c: Option<Vec<f64>>,
    #[serde(default)]
    c1: TermSpec,
    #[serde(default)]
    c2: TermSpec,
    #[serde(default)]
    precondition: bool,
    reference: Option<Vec<f64>>,
    z0: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AdmmParams {
    blocks: Option<usize>,
    #[serde(default = "default_dim_x")]
    dim_x: usize,
    #[serde(default = "default_dim_b")]
    dim_b: usize,
    #[serde(default = "default_shift")]
    shift: f64,
}

fn default_dim_x() -> usize {
    3
}

fn default_dim_b() -> usize {
    2
}

fn default_shift() -> f64 {
    0.5
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SlowParams {
    #[serde(default)]
    a: f64,
    #[serde(default = "default_blocks")]
    n_blocks: usize,
    #[serde(default = "default_horizon")]
    horizon: usize,
}

fn default_blocks() -> usize {
    200
}

fn default_horizon() -> usize {
    500
}

/// Builds the solver inputs; `gamma` is needed only by the ADMM kinds, where
/// it is part of the problem.
pub fn build(problem: &ProblemConfig, gamma: f64, seed: u64) -> Result<Built, CliError> {
    let mut rng = rng(seed);
    match problem.kind {
        ProblemKind::ThreeObjective => {
            let p: ThreeObjectiveParams = params(problem)?;
            let model = LinearModelParams {
                dim: p.dim,
                l: p.l,
                target: p.target,
                reference: p.reference,
                z0: p.z0,
            };
            let m = linear_model(model, &mut rng)?;
            let (f, g) = (term(&p.f, "f")?, term(&p.g, "g")?);
            let objective = Objective::new(
                {
                    let v = p.f.value();
                    move |x: &RealVector| v(x)
                },
                {
                    let v = p.g.value();
                    move |x: &RealVector| v(x)
                },
                {
                    let v = h_value(&m.l, &m.target);
                    move |x: &RealVector| v(x)
                },
            );
            let spec = ThreeObjective::new(f, g, m.l.clone(), half_sq_grad(&m.target)?).with_objective(objective);
            let mut problem = spec.problem();
            if let Some(r) = m.reference {
                problem = problem.with_reference(r);
            }
            Ok(Built::ThreeOp { problem, z0: m.z0 })
        }
        ProblemKind::SplitFeasibility => {
            let p: FeasibilityParams = params(problem)?;
            let l = match (&p.l, p.dim) {
                (Some(rows), _) => matrix(rows, "l")?,
                (None, Some(d)) if d > 0 => DenseMatrix::identity(d),
                _ => return Err(param_error("dim", "missing: give dim or l")),
            };
            let z0 = vector_or(p.z0, l.cols(), "z0", || RealVector::zeros(l.cols()))?;
            let problem = split_feasibility_problem(term(&p.c1, "c1")?, term(&p.c2, "c2")?, term(&p.c3, "c3")?, l);
            Ok(Built::ThreeOp { problem, z0 })
        }
        ProblemKind::MultiReg => {
            let p: MultiRegParams = params(problem)?;
            if p.regs.is_empty() {
                return Err(param_error("regs", "need at least one regularizer"));
            }
            let model = LinearModelParams {
                dim: p.dim,
                l: p.l,
                target: p.target,
                reference: None,
                z0: p.z0,
            };
            let m = linear_model(model, &mut rng)?;
            let regs = p
                .regs
                .iter()
                .enumerate()
                .map(|(i, r)| term(r, &format!("regs[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let values: Vec<ValueFn> = p.regs.iter().map(TermSpec::value).collect();
            let h = h_value(&m.l, &m.target);
            let objective: ValueFn = Arc::new(move |x: &RealVector| values.iter().map(|v| v(x)).sum::<f64>() + h(x));
            let z0s = vec![m.z0.clone(); regs.len()];
            let spec = MultiReg {
                regs,
                l: m.l,
                grad_h: half_sq_grad(&m.target)?,
                objective: Some(objective),
            };
            Ok(Built::MultiReg { spec, z0s })
        }
        ProblemKind::MatrixCompletion => {
            let p: CompletionParams = params(problem)?;
            if p.rows == 0 || p.cols == 0 || p.rank == 0 {
                return Err(param_error("rows", "rows, cols and rank must be positive"));
            }
            let (truth, observed) = synthetic_low_rank(&mut rng, p.rows, p.cols, p.rank, p.fraction)
                .map_err(|e| param_error("fraction", e))?;
            let spec = CompletionSpec {
                rows: p.rows,
                cols: p.cols,
                observed,
                mu: p.mu,
                lower: p.lower.unwrap_or(f64::NEG_INFINITY),
                upper: p.upper.unwrap_or(f64::INFINITY),
            };
            let problem = spec
                .problem()
                .map_err(|e| param_error("mu", e))?
                .with_reference(truth.to_vector());
            Ok(Built::ThreeOp {
                problem,
                z0: RealVector::zeros(p.rows * p.cols),
            })
        }
        ProblemKind::Qp => {
            let p: QpParams = params(problem)?;
            let q = match (&p.q, p.dim) {
                (Some(rows), _) => matrix(rows, "q")?,
                (None, Some(d)) if d > 0 => random_spd(&mut rng, d, 0.1),
                _ => return Err(param_error("dim", "missing: give dim or q")),
            };
            let n = q.rows();
            let c = vector_or(p.c, n, "c", || random_vector(&mut rng, n, 1.0))?;
            let mut spec = QpSpec::new(q, c, term(&p.c1, "c1")?, term(&p.c2, "c2")?);
            spec.precondition = p.precondition;
            let mut problem = spec.problem().map_err(|e| param_error("q", e))?;
            if let Some(r) = p.reference {
                problem = problem.with_reference(vector_or(Some(r), n, "reference", || unreachable!())?);
            }
            let z0 = vector_or(p.z0, n, "z0", || RealVector::zeros(n))?;
            Ok(Built::ThreeOp { problem, z0 })
        }
        ProblemKind::Admm3 | ProblemKind::AdmmM => {
            let p: AdmmParams = params(problem)?;
            let m = p
                .blocks
                .unwrap_or(if problem.kind == ProblemKind::Admm3 { 3 } else { 4 });
            if problem.kind == ProblemKind::Admm3 && m != 3 {
                return Err(param_error("blocks", "admm3 uses exactly 3 blocks"));
            }
            if m < 3 {
                return Err(param_error("blocks", "need at least 3 blocks"));
            }
            if p.dim_x == 0 || p.dim_b == 0 {
                return Err(param_error("dim_x", "block and constraint dimensions must be positive"));
            }
            if !(p.shift > 0.0) {
                return Err(param_error("shift", "must be positive"));
            }
            let blocks = (0..m)
                .map(|_| {
                    let pm = random_spd(&mut rng, p.dim_x, p.shift);
                    let q = random_vector(&mut rng, p.dim_x, 1.0);
                    let l = random_matrix(&mut rng, p.dim_b, p.dim_x);
                    ArgminOracle::quadratic(pm, q, l)
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| param_error("blocks", e))?;
            let b = random_vector(&mut rng, p.dim_b, 1.0);
            let problem = AdmmProblem::new(blocks, b, gamma);
            let w0 = RealVector::zeros(p.dim_b);
            let xm0 = problem
                .consistent_last_block(&w0)
                .map_err(|e| param_error("blocks", e))?;
            Ok(Built::Admm { problem, w0, xm0 })
        }
        ProblemKind::SlowExample => {
            let p: SlowParams = params(problem)?;
            let rate = Arc::new(|k: usize| 1.0 / ((k + 2) as f64).ln());
            let ex = build_slow_example(
                p.a,
                &ThetaSpec::SlowRate {
                    rate,
                    horizon: p.horizon,
                },
                p.n_blocks,
            )
            .map_err(|e| param_error("a", e))?;
            Ok(Built::ThreeOp {
                problem: ex.problem(),
                z0: ex.z0.clone(),
            })
        }
    }
}

use std::time::Instant;

use crate::batch;
use crate::error::SolveError;
use crate::numkit::{op_norm, DenseMatrix, RealVector};
use crate::operators::{compose_gradient, ForwardOperator, ProxOperator};
use crate::splitting::{
    solve_basic, Lambdas, Objective, RelaxationSchedule, SolveOutcome, Status, StopRule, ThreeOperatorProblem,
    TraceRecord, ValueFn,
};

/// `minimize f(x) + g(x) + h(Lx)` with `f, g` through their proxes and `h`
/// through its gradient.
#[derive(Clone, Debug)]
pub struct ThreeObjective {
    pub prox_f: ProxOperator,
    pub prox_g: ProxOperator,
    pub l: DenseMatrix,
    pub grad_h: ForwardOperator,
    pub objective: Option<Objective>,
}

impl ThreeObjective {
    pub fn new(prox_f: ProxOperator, prox_g: ProxOperator, l: DenseMatrix, grad_h: ForwardOperator) -> Self {
        Self {
            prox_f,
            prox_g,
            l,
            grad_h,
            objective: None,
        }
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = Some(objective);
        self
    }

    /// `A = ∂f`, `B = ∂g`, `C = Lᵀ∇h(L·)`.
    pub fn problem(&self) -> ThreeOperatorProblem {
        let c = compose_gradient(self.l.clone(), self.grad_h.clone());
        let p = ThreeOperatorProblem::new(self.l.cols(), self.prox_f.clone(), self.prox_g.clone(), c);
        match &self.objective {
            Some(o) => p.with_objective(o.clone()),
            None => p,
        }
    }
}

pub fn solve_three_objective(
    spec: &ThreeObjective,
    schedule: &RelaxationSchedule,
    z0: &RealVector,
    stop: StopRule,
) -> Result<SolveOutcome, SolveError> {
    solve_basic(&spec.problem(), schedule, z0, stop)
}

/// `minimize r₁(x) + … + r_m(x) + h(Lx)` in product-space form: one copy
/// `z_i` per regularizer, averaged into the consensus point each iteration.
#[derive(Clone)]
pub struct MultiReg {
    pub regs: Vec<ProxOperator>,
    pub l: DenseMatrix,
    pub grad_h: ForwardOperator,
    /// Total objective at the consensus point, if available.
    pub objective: Option<ValueFn>,
}

impl std::fmt::Debug for MultiReg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultiReg")
            .field("regs", &self.regs)
            .field("l", &self.l)
            .field("grad_h", &self.grad_h)
            .field("objective", &self.objective.is_some())
            .finish()
    }
}

impl MultiReg {
    /// Cocoercivity of `Lᵀ∇h(L·)`.
    pub fn forward_beta(&self) -> f64 {
        let n = op_norm(&self.l);
        self.grad_h.beta() / (n * n)
    }

    /// `γ < 2mβ`.
    pub fn stepsize_bound(&self) -> f64 {
        2.0 * self.regs.len() as f64 * self.forward_beta()
    }
}

#[derive(Clone, Debug)]
pub struct MultiRegOutcome {
    /// Consensus point `x = (1/m)Σ z_i` at the last evaluation.
    pub x: RealVector,
    pub zs: Vec<RealVector>,
    pub trace: Vec<TraceRecord>,
    pub status: Status,
}

/// Per iteration: `x = (1/m)Σ z_i`, `d = (1/m)Lᵀ∇h(Lx)` once, then for every
/// block `z_i ← z_i + λ(prox_{γr_i}(2x − z_i − γd) − x)`. The recorded
/// residual is `Σ ‖prox_{γr_i}(·) − x‖²`.
pub fn solve_multi_reg(
    spec: &MultiReg,
    gamma: f64,
    lambdas: Lambdas,
    z0s: &[RealVector],
    stop: StopRule,
) -> Result<MultiRegOutcome, SolveError> {
    stop.validate()?;
    let m = spec.regs.len();
    if m == 0 {
        return Err(SolveError::invalid("regs", "need at least one regularizer"));
    }
    if z0s.len() != m {
        return Err(SolveError::Dimension {
            context: "number of starting blocks",
            expected: m,
            found: z0s.len(),
        });
    }
    let dim = spec.l.cols();
    for z in z0s {
        SolveError::check_dim("starting block", dim, z.dim())?;
    }
    let schedule = RelaxationSchedule::with_default_epsilon(gamma, m as f64 * spec.forward_beta(), lambdas)?;
    schedule.validate(m as f64 * spec.forward_beta())?;
    let c = compose_gradient(spec.l.clone(), spec.grad_h.clone());
    let start = Instant::now();
    let tol_sq = stop.tol_sq();
    let mut zs = z0s.to_vec();
    let mut trace = Vec::new();
    for k in 0..stop.max_iter {
        let mut x = RealVector::zeros(dim);
        for z in &zs {
            x.axpy(1.0 / m as f64, z);
        }
        let d = &c.apply(&x)? * (gamma / m as f64);
        let lambda = schedule.checked_lambda(k)?;
        let pairs: Vec<(usize, &RealVector)> = zs.iter().enumerate().collect();
        let updates = batch::try_map(&pairs, |&(i, z)| {
            let mut half = x.lincomb(2.0, z, -1.0);
            half -= &d;
            let p = spec.regs[i].resolve(gamma, &half)?;
            let step = &p - &x;
            let mut next = z.clone();
            next.axpy(lambda, &step);
            Ok::<_, SolveError>((next, step.norm_sq()))
        })?;
        let fpr_sq: f64 = updates.iter().map(|(_, r)| r).sum();
        trace.push(TraceRecord {
            k,
            fpr_sq,
            objective: spec.objective.as_ref().map(|f| f(&x)),
            dist_ref: None,
            gamma_k: gamma,
            lambda_k: lambda,
            elapsed_s: start.elapsed().as_secs_f64(),
        });
        let next: Vec<RealVector> = updates.into_iter().map(|(z, _)| z).collect();
        if next.iter().any(|z| !z.is_finite()) {
            return Err(SolveError::NonFinite { k: k + 1 });
        }
        if fpr_sq <= tol_sq || k + 1 == stop.max_iter {
            let status = if fpr_sq <= tol_sq {
                Status::Converged
            } else {
                Status::MaxIterations
            };
            return Ok(MultiRegOutcome {
                x,
                zs: next,
                trace,
                status,
            });
        }
        zs = next;
    }
    Err(SolveError::invalid("max_iter", "must be at least 1"))
}

//! The three-operator fixed-point map, the relaxed basic iteration built on
//! it, solution recovery and the classical two-operator specializations.

mod problem;
mod schedule;
mod trace;

use std::time::Instant;

use crate::error::SolveError;
use crate::numkit::{DenseMatrix, RealVector};
use crate::operators::{project_subspace, ForwardOperator, ProxOperator};

pub use problem::{zero_value, Objective, ThreeOperatorProblem, ValueFn};
pub use schedule::{Lambdas, RelaxationSchedule};
pub use trace::{write_trace_csv, TraceRecord, TRACE_HEADER};

/// All points produced by one evaluation of `T` at `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverState {
    pub z: RealVector,
    pub x_b: RealVector,
    pub u_b: RealVector,
    pub x_a: RealVector,
    pub u_a: RealVector,
    pub k: usize,
    pub gamma_k: f64,
    pub fpr_sq: f64,
}

impl SolverState {
    /// `Tz = z + x_A − x_B`.
    pub fn t_z(&self) -> RealVector {
        let mut t = self.z.clone();
        t += &self.x_a;
        t -= &self.x_b;
        t
    }

    /// `x_A − x_B = Tz − z`.
    pub fn residual(&self) -> RealVector {
        &self.x_a - &self.x_b
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopRule {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            max_iter: 100_000,
            tol: 1e-10,
        }
    }
}

impl StopRule {
    pub fn new(max_iter: usize, tol: f64) -> Self {
        Self { max_iter, tol }
    }

    /// Runs exactly `n` iterations.
    pub fn iterations(n: usize) -> Self {
        Self {
            max_iter: n,
            tol: f64::NEG_INFINITY,
        }
    }

    /// Accepts `max_iter ≥ 1` and a tolerance that is nonnegative or the
    /// `−∞` of [`StopRule::iterations`].
    pub fn validate(&self) -> Result<(), SolveError> {
        if self.max_iter == 0 {
            return Err(SolveError::invalid("max_iter", "must be at least 1"));
        }
        if !(self.tol >= 0.0 || self.tol == f64::NEG_INFINITY) {
            return Err(SolveError::invalid("tol", "must be nonnegative"));
        }
        Ok(())
    }

    /// Threshold for squared residuals; never met when `tol` is `−∞`.
    pub fn tol_sq(&self) -> f64 {
        if self.tol < 0.0 {
            f64::NEG_INFINITY
        } else {
            self.tol * self.tol
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIterations,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub state: SolverState,
    pub trace: Vec<TraceRecord>,
    pub status: Status,
}

impl SolveOutcome {
    /// The reported solution `x_B`.
    pub fn solution(&self) -> &RealVector {
        &self.state.x_b
    }
}

/// Evaluates `T = I − J_{γB} + J_{γA}∘(2J_{γB} − I − γC∘J_{γB})` at `z`.
pub fn apply_t(problem: &ThreeOperatorProblem, gamma: f64, z: &RealVector) -> Result<SolverState, SolveError> {
    SolveError::check_dim("apply_t input", problem.dim(), z.dim())?;
    let x_b = problem.b.resolve(gamma, z)?;
    let u_b = (z - &x_b) * (1.0 / gamma);
    let c_xb = problem.c.apply(&x_b)?;
    let mut reflected = x_b.lincomb(2.0, z, -1.0);
    reflected.axpy(-gamma, &c_xb);
    let x_a = problem.a.resolve(gamma, &reflected)?;
    let u_a = (&reflected - &x_a) * (1.0 / gamma);
    let fpr_sq = x_a.dist_sq(&x_b);
    Ok(SolverState {
        z: z.clone(),
        x_b,
        u_b,
        x_a,
        u_a,
        k: 0,
        gamma_k: gamma,
        fpr_sq,
    })
}

/// Step-by-step driver for `z^{k+1} = z^k + λ_k(Tz^k − z^k)`.
pub struct BasicSolver<'a> {
    problem: &'a ThreeOperatorProblem,
    schedule: RelaxationSchedule,
    z: RealVector,
    k: usize,
}

impl<'a> BasicSolver<'a> {
    pub fn new(
        problem: &'a ThreeOperatorProblem,
        schedule: RelaxationSchedule,
        z0: RealVector,
    ) -> Result<Self, SolveError> {
        schedule.validate(problem.beta())?;
        SolveError::check_dim("initial point", problem.dim(), z0.dim())?;
        if !z0.is_finite() {
            return Err(SolveError::NonFinite { k: 0 });
        }
        Ok(Self {
            problem,
            schedule,
            z: z0,
            k: 0,
        })
    }

    pub fn z(&self) -> &RealVector {
        &self.z
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn schedule(&self) -> &RelaxationSchedule {
        &self.schedule
    }

    /// Evaluates `T` at `z^k` and returns that state together with `λ_k`,
    /// advancing to `z^{k+1}`.
    pub fn step(&mut self) -> Result<(SolverState, f64), SolveError> {
        let mut state = apply_t(self.problem, self.schedule.gamma(), &self.z)?;
        state.k = self.k;
        let lambda = self.schedule.checked_lambda(self.k)?;
        self.z.axpy(lambda, &state.residual());
        self.k += 1;
        if !self.z.is_finite() {
            return Err(SolveError::NonFinite { k: self.k });
        }
        Ok((state, lambda))
    }
}

pub(crate) fn record(problem: &ThreeOperatorProblem, state: &SolverState, lambda: f64, start: Instant) -> TraceRecord {
    TraceRecord {
        k: state.k,
        fpr_sq: state.fpr_sq,
        objective: problem
            .objective
            .as_ref()
            .map(|o| o.split_value(&state.x_a, &state.x_b)),
        dist_ref: problem.reference_solution.as_ref().map(|x| x.dist(&state.x_b)),
        gamma_k: state.gamma_k,
        lambda_k: lambda,
        elapsed_s: start.elapsed().as_secs_f64(),
    }
}

/// Runs the relaxed iteration until `fpr² ≤ tol²` or `max_iter` evaluations.
pub fn solve_basic(
    problem: &ThreeOperatorProblem,
    schedule: &RelaxationSchedule,
    z0: &RealVector,
    stop: StopRule,
) -> Result<SolveOutcome, SolveError> {
    solve_basic_observed(problem, schedule, z0, stop, |_, _| {})
}

/// As [`solve_basic`], calling `observe(state, λ_k)` after every evaluation.
pub fn solve_basic_observed(
    problem: &ThreeOperatorProblem,
    schedule: &RelaxationSchedule,
    z0: &RealVector,
    stop: StopRule,
    mut observe: impl FnMut(&SolverState, f64),
) -> Result<SolveOutcome, SolveError> {
    stop.validate()?;
    let start = Instant::now();
    let mut solver = BasicSolver::new(problem, schedule.clone(), z0.clone())?;
    let mut trace = Vec::new();
    let tol_sq = stop.tol_sq();
    loop {
        let (state, lambda) = solver.step()?;
        observe(&state, lambda);
        trace.push(record(problem, &state, lambda, start));
        if state.fpr_sq <= tol_sq {
            return Ok(SolveOutcome {
                state,
                trace,
                status: Status::Converged,
            });
        }
        if solver.k() >= stop.max_iter {
            return Ok(SolveOutcome {
                state,
                trace,
                status: Status::MaxIterations,
            });
        }
    }
}

/// `x* = J_{γB}(z*)`.
pub fn recover_solution(
    problem: &ThreeOperatorProblem,
    gamma: f64,
    z_star: &RealVector,
) -> Result<RealVector, SolveError> {
    Ok(problem.b.resolve(gamma, z_star)?)
}

/// Classical schemes recovered from the three-operator map.
#[derive(Clone, Debug)]
pub enum SplitMode {
    /// Forward-backward: `B = 0`.
    Fbs,
    /// Douglas–Rachford: `C = 0`.
    Drs,
    /// Forward-Douglas–Rachford over the subspace with this projector:
    /// `B = N_V`, `C = P_V∘C∘P_V`.
    Fdrs(Option<DenseMatrix>),
}

pub fn specialize(problem: &ThreeOperatorProblem, mode: SplitMode) -> Result<ThreeOperatorProblem, SolveError> {
    let mut out = problem.clone();
    match mode {
        SplitMode::Fbs => out.b = ProxOperator::zero(),
        SplitMode::Drs => out.c = ForwardOperator::zero(),
        SplitMode::Fdrs(projector) => {
            let projector = projector.ok_or(SolveError::Missing("subspace projector for fdrs"))?;
            SolveError::check_dim("subspace projector", problem.dim(), projector.rows())?;
            let inner = problem.c.clone();
            let pv = projector.clone();
            let c = ForwardOperator::new("projected_forward", inner.beta(), move |x| {
                let px = pv.mul_vec(x)?;
                Ok(pv.mul_vec(&inner.apply(&px)?)?)
            })
            .with_lipschitz(problem.c.l_c());
            out.b = project_subspace(projector)?;
            out.c = c;
        }
    }
    Ok(out)
}

/// `‖z−w‖² − (1−α)/α‖(I−T)z − (I−T)w‖² − ‖Tz−Tw‖²` with `α = 2β/(4β−γ)`;
/// nonnegative for `γ ∈ (0, 2β)`.
pub fn averaged_inequality_gap(
    problem: &ThreeOperatorProblem,
    gamma: f64,
    z: &RealVector,
    w: &RealVector,
) -> Result<f64, SolveError> {
    let beta = problem.beta();
    if !(gamma > 0.0 && gamma < 2.0 * beta) {
        return Err(SolveError::StepsizeBound {
            gamma,
            bound: 2.0 * beta,
        });
    }
    let alpha = if beta.is_finite() {
        2.0 * beta / (4.0 * beta - gamma)
    } else {
        0.5
    };
    let sz = apply_t(problem, gamma, z)?;
    let sw = apply_t(problem, gamma, w)?;
    let diff_res = &sz.residual() - &sw.residual();
    Ok(z.dist_sq(w) - (1.0 - alpha) / alpha * diff_res.norm_sq() - sz.t_z().dist_sq(&sw.t_z()))
}

/// Strengthened form: for `γ̄ < 2βε̄`, `ᾱ = 1/(2−ε̄)`, also subtracts
/// `γ̄(2β − γ̄/ε̄)‖C J_{γ̄B} z − C J_{γ̄B} w‖²`.
pub fn strengthened_inequality_gap(
    problem: &ThreeOperatorProblem,
    gamma: f64,
    epsilon: f64,
    z: &RealVector,
    w: &RealVector,
) -> Result<f64, SolveError> {
    let schedule = RelaxationSchedule::new(gamma, epsilon, Lambdas::default())?;
    schedule.validate(problem.beta())?;
    let alpha = schedule.alpha();
    let sz = apply_t(problem, gamma, z)?;
    let sw = apply_t(problem, gamma, w)?;
    let diff_res = &sz.residual() - &sw.residual();
    let dc = problem.c.apply(&sz.x_b)?.dist_sq(&problem.c.apply(&sw.x_b)?);
    let cocoercive_term = if dc == 0.0 {
        0.0
    } else {
        gamma * (2.0 * problem.beta() - gamma / epsilon) * dc
    };
    Ok(z.dist_sq(w) - (1.0 - alpha) / alpha * diff_res.norm_sq() - cocoercive_term - sz.t_z().dist_sq(&sw.t_z()))
}

use std::time::Instant;

use crate::error::SolveError;
use crate::numkit::RealVector;
use crate::splitting::{SolveOutcome, SolverState, Status, StopRule, ThreeOperatorProblem, TraceRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AccelBranch {
    /// Uses `μ_B`, `μ_C` and the cocoercivity of `C`.
    Cocoercive,
    /// Uses `μ_B > 0` and the Lipschitz constant of `C`.
    Lipschitz,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AccelConfig {
    pub gamma0: f64,
    pub eta: f64,
    pub branch: AccelBranch,
}

pub const DEFAULT_ETA: f64 = 0.5;

impl AccelConfig {
    pub fn cocoercive(gamma0: f64, eta: f64) -> Self {
        Self {
            gamma0,
            eta,
            branch: AccelBranch::Cocoercive,
        }
    }

    pub fn lipschitz(gamma0: f64) -> Self {
        Self {
            gamma0,
            eta: DEFAULT_ETA,
            branch: AccelBranch::Lipschitz,
        }
    }

    /// Checks the branch preconditions against the problem constants.
    pub fn validate(&self, problem: &ThreeOperatorProblem) -> Result<(), SolveError> {
        if !(self.gamma0 > 0.0 && self.gamma0.is_finite()) {
            return Err(SolveError::invalid("gamma0", "must be positive"));
        }
        match self.branch {
            AccelBranch::Cocoercive => {
                if !(self.eta > 0.0 && self.eta < 1.0) {
                    return Err(SolveError::invalid(
                        "eta",
                        format!("must lie in (0,1), got {}", self.eta),
                    ));
                }
                let bound = 2.0 * problem.beta() * (1.0 - self.eta);
                if self.gamma0 >= bound {
                    return Err(SolveError::invalid(
                        "gamma0",
                        format!("must be < 2·beta·(1 − eta) = {bound}"),
                    ));
                }
            }
            AccelBranch::Lipschitz => {
                let mu_b = problem.b.mu();
                if !(mu_b > 0.0) {
                    return Err(SolveError::invalid("mu_b", "the lipschitz branch needs mu_B > 0"));
                }
                let l_c = problem.c.l_c();
                let bound = 2.0 * mu_b / (l_c * l_c);
                if self.gamma0 >= bound {
                    return Err(SolveError::invalid(
                        "gamma0",
                        format!("must be < 2·mu_B/L_C² = {bound}"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Stepsize update for the cocoercive branch; the result satisfies
/// `(1 + 2γ_kμ_B)/γ_k² = (1 − 2γ_{k+1}μ_Cη)/γ_{k+1}²`.
pub fn next_stepsize_cocoercive(gamma_k: f64, mu_b: f64, mu_c: f64, eta: f64) -> Result<f64, SolveError> {
    if !(gamma_k > 0.0 && gamma_k.is_finite()) {
        return Err(SolveError::invalid("gamma_k", "must be positive"));
    }
    if !(mu_b >= 0.0 && mu_c >= 0.0) {
        return Err(SolveError::invalid("mu", "moduli must be nonnegative"));
    }
    let g2 = gamma_k * gamma_k;
    let p = 2.0 * g2 * mu_c * eta;
    let q = 1.0 + 2.0 * gamma_k * mu_b;
    Ok((-p + (p * p + 4.0 * q * g2).sqrt()) / (2.0 * q))
}

/// Stepsize update for the Lipschitz branch: `γ_k/√(1 + 2γ_k(μ_B − γ_kL_C²/2))`.
pub fn next_stepsize_lipschitz(gamma_k: f64, mu_b: f64, l_c: f64) -> Result<f64, SolveError> {
    if !(mu_b > 0.0) {
        return Err(SolveError::invalid("mu_b", "must be positive"));
    }
    if !(gamma_k > 0.0 && gamma_k <= 2.0 * mu_b / (l_c * l_c)) {
        return Err(SolveError::invalid(
            "gamma_k",
            format!("must lie in (0, 2·mu_B/L_C²], got {gamma_k}"),
        ));
    }
    Ok(gamma_k / (1.0 + 2.0 * gamma_k * (mu_b - gamma_k * l_c * l_c / 2.0)).sqrt())
}

/// Points of iterate `k`: `x_B^k`, `u_B^k`, `x_A^k` and the stepsize `γ_k`
/// used to produce `x_A^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct AccelIterate {
    pub k: usize,
    pub gamma: f64,
    pub x_a: RealVector,
    pub x_b: RealVector,
    pub u_b: RealVector,
}

/// Step-by-step driver of the accelerated iteration.
pub struct AccelSolver<'a> {
    problem: &'a ThreeOperatorProblem,
    config: AccelConfig,
    current: AccelIterate,
}

impl<'a> AccelSolver<'a> {
    /// Starts from an arbitrary `x_A⁰`, with `x_B⁰ = J_{γ₀B}(x_A⁰)` and
    /// `u_B⁰ = (x_A⁰ − x_B⁰)/γ₀`.
    pub fn new(problem: &'a ThreeOperatorProblem, config: AccelConfig, x_a0: RealVector) -> Result<Self, SolveError> {
        config.validate(problem)?;
        SolveError::check_dim("initial point", problem.dim(), x_a0.dim())?;
        let g = config.gamma0;
        let x_b = problem.b.resolve(g, &x_a0)?;
        let u_b = (&x_a0 - &x_b) * (1.0 / g);
        Ok(Self {
            problem,
            config,
            current: AccelIterate {
                k: 0,
                gamma: g,
                x_a: x_a0,
                x_b,
                u_b,
            },
        })
    }

    pub fn current(&self) -> &AccelIterate {
        &self.current
    }

    fn next_gamma(&self, gamma: f64) -> Result<f64, SolveError> {
        let p = self.problem;
        match self.config.branch {
            AccelBranch::Cocoercive => next_stepsize_cocoercive(gamma, p.b.mu(), p.c.mu_c(), self.config.eta),
            AccelBranch::Lipschitz => next_stepsize_lipschitz(gamma, p.b.mu(), p.c.l_c()),
        }
    }

    /// Advances to iterate `k + 1`.
    pub fn step(&mut self) -> Result<&AccelIterate, SolveError> {
        let p = self.problem;
        let cur = &self.current;
        let g = cur.gamma;
        let mut input = cur.x_a.clone();
        input.axpy(g, &cur.u_b);
        let x_b = p.b.resolve(g, &input)?;
        let u_b = (&input - &x_b) * (1.0 / g);
        let g_next = self.next_gamma(g)?;
        let mut arg = x_b.clone();
        arg.axpy(-g_next, &u_b);
        arg.axpy(-g_next, &p.c.apply(&x_b)?);
        let x_a = p.a.resolve(g_next, &arg)?;
        let k = cur.k + 1;
        if !(x_a.is_finite() && x_b.is_finite() && g_next.is_finite()) {
            return Err(SolveError::NonFinite { k });
        }
        self.current = AccelIterate {
            k,
            gamma: g_next,
            x_a,
            x_b,
            u_b,
        };
        Ok(&self.current)
    }

    /// The iterate expressed as a [`SolverState`] at stepsize `γ_k`, with
    /// `z = x_B + γ_k u_B`.
    pub fn state(&self) -> Result<SolverState, SolveError> {
        let it = &self.current;
        let g = it.gamma;
        let mut z = it.x_b.clone();
        z.axpy(g, &it.u_b);
        let mut reflected = it.x_b.clone();
        reflected.axpy(-g, &it.u_b);
        reflected.axpy(-g, &self.problem.c.apply(&it.x_b)?);
        let u_a = (&reflected - &it.x_a) * (1.0 / g);
        Ok(SolverState {
            z,
            x_b: it.x_b.clone(),
            u_b: it.u_b.clone(),
            x_a: it.x_a.clone(),
            u_a,
            k: it.k,
            gamma_k: g,
            fpr_sq: it.x_a.dist_sq(&it.x_b),
        })
    }
}

/// Runs the accelerated iteration until `‖x_A^k − x_B^k‖² ≤ tol²` (k ≥ 1)
/// or `max_iter` iterates.
pub fn solve_accelerated(
    problem: &ThreeOperatorProblem,
    config: AccelConfig,
    x_a0: &RealVector,
    stop: StopRule,
) -> Result<SolveOutcome, SolveError> {
    stop.validate()?;
    let start = Instant::now();
    let mut solver = AccelSolver::new(problem, config, x_a0.clone())?;
    let mut trace = Vec::new();
    let tol_sq = stop.tol_sq();
    loop {
        solver.step()?;
        let state = solver.state()?;
        trace.push(TraceRecord {
            k: state.k,
            fpr_sq: state.fpr_sq,
            objective: problem
                .objective
                .as_ref()
                .map(|o| o.split_value(&state.x_a, &state.x_b)),
            dist_ref: problem.reference_solution.as_ref().map(|x| x.dist(&state.x_b)),
            gamma_k: state.gamma_k,
            lambda_k: 1.0,
            elapsed_s: start.elapsed().as_secs_f64(),
        });
        let status = if state.fpr_sq <= tol_sq {
            Some(Status::Converged)
        } else if state.k >= stop.max_iter {
            Some(Status::MaxIterations)
        } else {
            None
        };
        if let Some(status) = status {
            return Ok(SolveOutcome { state, trace, status });
        }
    }
}

use std::time::Instant;

use crate::error::SolveError;
use crate::numkit::RealVector;
use crate::operators::{ForwardOperator, ProxOperator};
use crate::splitting::{SolveOutcome, SolverState, Status, StopRule, ThreeOperatorProblem, TraceRecord};

pub const RHO_MIN: f64 = 1e-6;
pub const ACCEPT_SLACK: f64 = 1e-12;
const DIVERGENCE_FACTOR: f64 = 10.0;
const DIVERGENCE_WINDOW: usize = 100;

fn x_a_for(
    a: &ProxOperator,
    grad: &RealVector,
    gamma: f64,
    rho: f64,
    z: &RealVector,
    x_b: &RealVector,
) -> Result<RealVector, SolveError> {
    let mut arg = x_b.clone();
    arg.axpy(rho, &(x_b - z));
    arg.axpy(-gamma * rho, grad);
    Ok(a.resolve(gamma * rho, &arg)?)
}

/// Backtracks `ρ = 1, 1/2, 1/4, …` until
/// `h(x_A) ≤ h(x_B) + ⟨x_A − x_B, ∇h(x_B)⟩ + ‖x_A − x_B‖²/(2γρ)`.
pub fn find_rho(
    a: &ProxOperator,
    grad_h: &ForwardOperator,
    h_value: &dyn Fn(&RealVector) -> f64,
    gamma: f64,
    z: &RealVector,
    x_b: &RealVector,
) -> Result<(f64, RealVector), SolveError> {
    let grad = grad_h.apply(x_b)?;
    let h_b = h_value(x_b);
    let mut rho = 1.0;
    while rho >= RHO_MIN {
        let x_a = x_a_for(a, &grad, gamma, rho, z, x_b)?;
        let d = &x_a - x_b;
        let model = h_b + d.dot(&grad) + d.norm_sq() / (2.0 * gamma * rho);
        if h_value(&x_a) <= model + ACCEPT_SLACK {
            return Ok((rho, x_a));
        }
        rho *= 0.5;
    }
    Err(SolveError::LineSearchFailed { k: 0, rho_min: RHO_MIN })
}

/// Evaluates `T_γ^ρ` at `z` for a fixed `ρ`.
pub fn apply_t_rho(
    problem: &ThreeOperatorProblem,
    gamma: f64,
    rho: f64,
    z: &RealVector,
) -> Result<SolverState, SolveError> {
    SolveError::check_dim("apply_t_rho input", problem.dim(), z.dim())?;
    let x_b = problem.b.resolve(gamma, z)?;
    let grad = problem.c.apply(&x_b)?;
    let x_a = x_a_for(&problem.a, &grad, gamma, rho, z, &x_b)?;
    Ok(line_state(z, x_b, x_a, &grad, gamma, rho, 0))
}

fn line_state(
    z: &RealVector,
    x_b: RealVector,
    x_a: RealVector,
    grad: &RealVector,
    gamma: f64,
    rho: f64,
    k: usize,
) -> SolverState {
    let u_b = (z - &x_b) * (1.0 / gamma);
    let mut arg = x_b.clone();
    arg.axpy(rho, &(&x_b - z));
    arg.axpy(-gamma * rho, grad);
    let u_a = (&arg - &x_a) * (1.0 / (gamma * rho));
    let fpr_sq = x_a.dist_sq(&x_b);
    SolverState {
        z: z.clone(),
        x_b,
        u_b,
        x_a,
        u_a,
        k,
        gamma_k: gamma,
        fpr_sq,
    }
}

#[derive(Clone, Debug)]
pub struct LineSearchOutcome {
    pub outcome: SolveOutcome,
    /// Accepted `ρ` at each iteration.
    pub rhos: Vec<f64>,
}

/// Iterates `z^{k+1} = z^k + x_A^k − x_B^k` with a backtracked `ρ` each step.
/// Needs the value of `h` from the problem objective. Aborts if the fixed-point
/// residual stays above ten times its running minimum for 100 consecutive
/// steps.
pub fn solve_linesearch(
    problem: &ThreeOperatorProblem,
    gamma: f64,
    z0: &RealVector,
    stop: StopRule,
) -> Result<LineSearchOutcome, SolveError> {
    stop.validate()?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(SolveError::invalid("gamma", "must be positive"));
    }
    let h = problem
        .objective
        .as_ref()
        .map(|o| o.h.clone())
        .ok_or(SolveError::Missing("objective value of h for line search"))?;
    SolveError::check_dim("initial point", problem.dim(), z0.dim())?;
    let start = Instant::now();
    let tol_sq = stop.tol_sq();
    let mut z = z0.clone();
    let mut trace = Vec::new();
    let mut rhos = Vec::new();
    let mut running_min = f64::INFINITY;
    let mut above = 0;
    for k in 0.. {
        let x_b = problem.b.resolve(gamma, &z)?;
        let grad = problem.c.apply(&x_b)?;
        let (rho, x_a) = find_rho(&problem.a, &problem.c, h.as_ref(), gamma, &z, &x_b).map_err(|e| match e {
            SolveError::LineSearchFailed { rho_min, .. } => SolveError::LineSearchFailed { k, rho_min },
            other => other,
        })?;
        let state = line_state(&z, x_b, x_a, &grad, gamma, rho, k);
        rhos.push(rho);
        trace.push(TraceRecord {
            k,
            fpr_sq: state.fpr_sq,
            objective: problem
                .objective
                .as_ref()
                .map(|o| o.split_value(&state.x_a, &state.x_b)),
            dist_ref: problem.reference_solution.as_ref().map(|x| x.dist(&state.x_b)),
            gamma_k: gamma,
            lambda_k: 1.0,
            elapsed_s: start.elapsed().as_secs_f64(),
        });
        running_min = running_min.min(state.fpr_sq);
        if state.fpr_sq > DIVERGENCE_FACTOR * running_min {
            above += 1;
            if above >= DIVERGENCE_WINDOW {
                return Err(SolveError::Diverged {
                    k,
                    fpr_sq: state.fpr_sq,
                    running_min,
                });
            }
        } else {
            above = 0;
        }
        let status = if state.fpr_sq <= tol_sq {
            Some(Status::Converged)
        } else if k + 1 >= stop.max_iter {
            Some(Status::MaxIterations)
        } else {
            None
        };
        if let Some(status) = status {
            return Ok(LineSearchOutcome {
                outcome: SolveOutcome { state, trace, status },
                rhos,
            });
        }
        z += &state.residual();
        if !z.is_finite() {
            return Err(SolveError::NonFinite { k: k + 1 });
        }
    }
    unreachable!("the iteration loop only exits by returning")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::DenseMatrix;
    use crate::operators::grad_quadratic;

    fn v(xs: &[f64]) -> RealVector {
        RealVector::from(xs)
    }

    #[test]
    fn zero_h_accepts_full_step() {
        let (rho, _) = find_rho(
            &ProxOperator::zero(),
            &ForwardOperator::zero(),
            &|_| 0.0,
            3.0,
            &v(&[1.0]),
            &v(&[0.2]),
        )
        .unwrap();
        assert_eq!(rho, 1.0);
    }

    #[test]
    fn quadratic_h_backtracks_to_inverse_gamma() {
        let grad = grad_quadratic(DenseMatrix::identity(1), v(&[0.0]), 1.0).unwrap();
        let h = |x: &RealVector| 0.5 * x.norm_sq();
        let (rho, _) = find_rho(&ProxOperator::zero(), &grad, &h, 0.5, &v(&[2.0]), &v(&[1.0])).unwrap();
        assert_eq!(rho, 1.0);
        let (rho, _) = find_rho(&ProxOperator::zero(), &grad, &h, 4.0, &v(&[2.0]), &v(&[1.0])).unwrap();
        assert_eq!(rho, 0.25);
    }

    #[test]
    fn failure_when_no_rho_passes() {
        let grad = ForwardOperator::zero();
        // a jump in h that no quadratic model covers
        let r = find_rho(
            &ProxOperator::zero(),
            &grad,
            &|x: &RealVector| if x[0] == 0.0 { 0.0 } else { 1.0 },
            1.0,
            &v(&[-1.0]),
            &v(&[0.0]),
        );
        assert!(matches!(r, Err(SolveError::LineSearchFailed { .. })));
    }
}

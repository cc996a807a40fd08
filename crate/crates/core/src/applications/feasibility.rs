use crate::error::SolveError;
use crate::numkit::{DenseMatrix, RealVector};
use crate::operators::{grad_feasibility, ProxOperator};
use crate::splitting::{solve_basic, Objective, RelaxationSchedule, SolveOutcome, StopRule, ThreeOperatorProblem};

/// Find `x ∈ C₁ ∩ C₂` with `Lx ∈ C₃` as `0 ∈ N_{C₁}x + N_{C₂}x + ∇(½d²(L·, C₃))x`.
/// Each set enters through its projection.
pub fn split_feasibility_problem(
    c1: ProxOperator,
    c2: ProxOperator,
    c3: ProxOperator,
    l: DenseMatrix,
) -> ThreeOperatorProblem {
    let dim = l.cols();
    let (l_h, c3_h) = (l.clone(), c3.clone());
    let h = move |x: &RealVector| {
        let lx = l_h.mul_vec(x).expect("shape checked by solver");
        let p = c3_h.resolve(1.0, &lx).expect("projection");
        0.5 * lx.dist_sq(&p)
    };
    ThreeOperatorProblem::new(dim, c1, c2, grad_feasibility(l, c3)).with_objective(Objective::new(|_| 0.0, |_| 0.0, h))
}

#[derive(Clone, Debug)]
pub struct FeasibilityOutcome {
    pub outcome: SolveOutcome,
    /// `d(Lx, C₃)` at the returned point.
    pub distance_c3: f64,
}

impl FeasibilityOutcome {
    pub fn x(&self) -> &RealVector {
        self.outcome.solution()
    }
}

pub fn solve_split_feasibility(
    c1: ProxOperator,
    c2: ProxOperator,
    c3: ProxOperator,
    l: DenseMatrix,
    schedule: &RelaxationSchedule,
    z0: &RealVector,
    stop: StopRule,
) -> Result<FeasibilityOutcome, SolveError> {
    let problem = split_feasibility_problem(c1, c2, c3.clone(), l.clone());
    let outcome = solve_basic(&problem, schedule, z0, stop)?;
    let lx = l.mul_vec(outcome.solution())?;
    let distance_c3 = lx.dist(&c3.resolve(1.0, &lx)?);
    Ok(FeasibilityOutcome { outcome, distance_c3 })
}

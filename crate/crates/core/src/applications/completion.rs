use rand::seq::index::sample;

use crate::corpus::{random_matrix, CorpusRng};
use crate::error::SolveError;
use crate::numkit::{DenseMatrix, RealVector};
use crate::operators::{project_box, prox_nuclear, ForwardOperator, ProxOperator};
use crate::splitting::{
    solve_basic_observed, Objective, RelaxationSchedule, SolveOutcome, StopRule, ThreeOperatorProblem,
};

/// One observed entry `(row, col, value)`.
pub type Observation = (usize, usize, f64);

/// `minimize ½‖mask ⊙ (X − X₀)‖² + μ‖X‖_*  subject to  l ≤ X ≤ u` over
/// row-major flattened `rows × cols` matrices.
#[derive(Clone, Debug)]
pub struct CompletionSpec {
    pub rows: usize,
    pub cols: usize,
    pub observed: Vec<Observation>,
    pub mu: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug)]
pub struct CompletionOutcome {
    pub matrix: DenseMatrix,
    pub outcome: SolveOutcome,
    /// Root mean-square error over the observed entries, one per trace row.
    pub rmse: Vec<f64>,
}

impl CompletionSpec {
    fn validate(&self) -> Result<(), SolveError> {
        if self.observed.is_empty() {
            return Err(SolveError::invalid("observed", "need at least one observed entry"));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(SolveError::invalid("mu", "must be finite and nonnegative"));
        }
        if !(self.lower <= self.upper) {
            return Err(SolveError::invalid("bounds", "lower must not exceed upper"));
        }
        for &(i, j, value) in &self.observed {
            if i >= self.rows || j >= self.cols {
                return Err(SolveError::invalid(
                    "observed",
                    format!("entry ({i}, {j}) outside {}x{}", self.rows, self.cols),
                ));
            }
            if !value.is_finite() {
                return Err(SolveError::invalid(
                    "observed",
                    format!("entry ({i}, {j}) is not finite"),
                ));
            }
        }
        Ok(())
    }

    fn indexed(&self) -> Vec<(usize, f64)> {
        self.observed.iter().map(|&(i, j, v)| (i * self.cols + j, v)).collect()
    }

    /// `A = box`, `B = μ‖·‖_*`, `C = mask ⊙ (X − X₀)` with `β = 1`.
    pub fn problem(&self) -> Result<ThreeOperatorProblem, SolveError> {
        self.validate()?;
        let n = self.rows * self.cols;
        let a = project_box(RealVector::from(&[self.lower][..]), RealVector::from(&[self.upper][..]))?;
        let b = if self.mu > 0.0 {
            prox_nuclear(self.mu, self.rows, self.cols)?
        } else {
            ProxOperator::zero()
        };
        let obs = self.indexed();
        let grad_obs = obs.clone();
        let c = ForwardOperator::new("masked_residual", 1.0, move |x| {
            let mut g = RealVector::zeros(x.dim());
            for &(idx, v) in &grad_obs {
                g[idx] = x[idx] - v;
            }
            Ok(g)
        })
        .with_lipschitz(1.0);
        let (rows, cols, mu) = (self.rows, self.cols, self.mu);
        let nuclear = move |x: &RealVector| {
            if mu == 0.0 {
                return 0.0;
            }
            let m = DenseMatrix::from_vector(rows, cols, x).expect("shape");
            mu * crate::numkit::svd(&m)
                .map(|f| f.s.iter().sum::<f64>())
                .unwrap_or(f64::NAN)
        };
        let h = move |x: &RealVector| 0.5 * obs.iter().map(|&(idx, v)| (x[idx] - v).powi(2)).sum::<f64>();
        Ok(ThreeOperatorProblem::new(n, a, b, c).with_objective(Objective::new(|_| 0.0, nuclear, h)))
    }

    pub fn rmse(&self, x: &RealVector) -> f64 {
        let obs = self.indexed();
        let sum: f64 = obs.iter().map(|&(idx, v)| (x[idx] - v).powi(2)).sum();
        (sum / obs.len() as f64).sqrt()
    }

    pub fn solve(
        &self,
        schedule: &RelaxationSchedule,
        z0: &RealVector,
        stop: StopRule,
    ) -> Result<CompletionOutcome, SolveError> {
        let problem = self.problem()?;
        let mut rmse = Vec::new();
        let outcome = solve_basic_observed(&problem, schedule, z0, stop, |s, _| rmse.push(self.rmse(&s.x_b)))?;
        let matrix = DenseMatrix::from_vector(self.rows, self.cols, outcome.solution())?;
        Ok(CompletionOutcome { matrix, outcome, rmse })
    }
}

/// A `rows × cols` matrix of the given rank with entries of order one, and a
/// uniformly sampled subset of `⌈fraction·rows·cols⌉` of its entries.
pub fn synthetic_low_rank(
    rng: &mut CorpusRng,
    rows: usize,
    cols: usize,
    rank: usize,
    fraction: f64,
) -> Result<(DenseMatrix, Vec<Observation>), SolveError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(SolveError::invalid("fraction", "must lie in (0, 1]"));
    }
    let left = random_matrix(rng, rows, rank);
    let right = random_matrix(rng, rank, cols);
    let full = left.matmul(&right)?.scaled(1.0 / (rank as f64).sqrt());
    let count = ((fraction * (rows * cols) as f64).ceil() as usize).min(rows * cols);
    let mut picked = sample(rng, rows * cols, count).into_vec();
    picked.sort_unstable();
    let observed = picked
        .into_iter()
        .map(|idx| (idx / cols, idx % cols, full.get(idx / cols, idx % cols)))
        .collect();
    Ok((full, observed))
}

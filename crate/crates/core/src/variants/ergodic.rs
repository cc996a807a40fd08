use crate::error::SolveError;
use crate::numkit::RealVector;
use crate::splitting::SolverState;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AveragingMode {
    /// Weights `λ_i / Σλ_j`.
    Uniform,
    /// Weights `2(i+1)/((k+1)(k+2))`; requires constant `λ`.
    Weighted,
}

/// Running ergodic averages of `x_B^i` and `x_A^i`.
#[derive(Clone, Debug)]
pub struct ErgodicAccumulator {
    mode: AveragingMode,
    sum_b: RealVector,
    sum_a: RealVector,
    total_weight: f64,
    count: usize,
    lambda0: Option<f64>,
}

impl ErgodicAccumulator {
    pub fn new(mode: AveragingMode, dim: usize) -> Self {
        Self {
            mode,
            sum_b: RealVector::zeros(dim),
            sum_a: RealVector::zeros(dim),
            total_weight: 0.0,
            count: 0,
            lambda0: None,
        }
    }

    pub fn mode(&self) -> AveragingMode {
        self.mode
    }

    pub fn update(&mut self, state: &SolverState, lambda: f64) -> Result<(), SolveError> {
        SolveError::check_dim("ergodic update", self.sum_b.dim(), state.x_b.dim())?;
        let weight = match self.mode {
            AveragingMode::Uniform => lambda,
            AveragingMode::Weighted => {
                match self.lambda0 {
                    Some(l0) if l0 != lambda => {
                        return Err(SolveError::invalid(
                            "lambda",
                            "weighted averaging needs a constant relaxation parameter",
                        ))
                    }
                    _ => self.lambda0 = Some(lambda),
                }
                (self.count + 1) as f64
            }
        };
        self.sum_b.axpy(weight, &state.x_b);
        self.sum_a.axpy(weight, &state.x_a);
        self.total_weight += weight;
        self.count += 1;
        Ok(())
    }

    /// Number of iterates absorbed so far (`k + 1`).
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn average_b(&self) -> Option<RealVector> {
        (self.count > 0).then(|| &self.sum_b * (1.0 / self.total_weight))
    }

    pub fn average_a(&self) -> Option<RealVector> {
        (self.count > 0).then(|| &self.sum_a * (1.0 / self.total_weight))
    }
}

/// Functional form of [`ErgodicAccumulator::update`].
pub fn ergodic_update(
    mut acc: ErgodicAccumulator,
    state: &SolverState,
    lambda: f64,
) -> Result<ErgodicAccumulator, SolveError> {
    acc.update(state, lambda)?;
    Ok(acc)
}

use std::fmt;
use std::sync::Arc;

use crate::error::SolveError;

/// Relaxation parameters `λ_k`.
#[derive(Clone)]
pub enum Lambdas {
    Constant(f64),
    Varying(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl Lambdas {
    pub fn varying(f: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        Self::Varying(Arc::new(f))
    }

    pub fn at(&self, k: usize) -> f64 {
        match self {
            Self::Constant(l) => *l,
            Self::Varying(f) => f(k),
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            Self::Constant(l) => Some(*l),
            Self::Varying(_) => None,
        }
    }
}

impl Default for Lambdas {
    fn default() -> Self {
        Self::Constant(1.0)
    }
}

impl fmt::Debug for Lambdas {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(l) => write!(f, "Constant({l})"),
            Self::Varying(_) => f.write_str("Varying(..)"),
        }
    }
}

/// Stepsize `γ`, slack `ε` and relaxation sequence for the basic iteration.
/// Valid when `γ < 2βε` and every `λ_k ∈ (0, 1/α)` with `α = 1/(2 − ε)`.
#[derive(Clone, Debug)]
pub struct RelaxationSchedule {
    gamma: f64,
    epsilon: f64,
    lambdas: Lambdas,
}

impl RelaxationSchedule {
    pub fn new(gamma: f64, epsilon: f64, lambdas: Lambdas) -> Result<Self, SolveError> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(SolveError::invalid("gamma", format!("must be positive, got {gamma}")));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(SolveError::invalid(
                "epsilon",
                format!("must lie in (0,1), got {epsilon}"),
            ));
        }
        Ok(Self {
            gamma,
            epsilon,
            lambdas,
        })
    }

    /// `ε = min(1 − 1e−6, γ/(2β) + 1e−6)`, so `γ < 2βε` whenever `γ < 2β`.
    pub fn default_epsilon(gamma: f64, beta: f64) -> f64 {
        (gamma / (2.0 * beta) + 1e-6).min(1.0 - 1e-6)
    }

    /// `γ = β` (1 when C vanishes), default `ε`, `λ ≡ 1`.
    pub fn default_for(beta: f64) -> Self {
        let gamma = if beta.is_finite() { beta } else { 1.0 };
        Self::with_default_epsilon(gamma, beta, Lambdas::default()).expect("default schedule is valid")
    }

    pub fn with_default_epsilon(gamma: f64, beta: f64, lambdas: Lambdas) -> Result<Self, SolveError> {
        Self::new(gamma, Self::default_epsilon(gamma, beta), lambdas)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alpha(&self) -> f64 {
        1.0 / (2.0 - self.epsilon)
    }

    pub fn lambdas(&self) -> &Lambdas {
        &self.lambdas
    }

    pub fn lambda(&self, k: usize) -> f64 {
        self.lambdas.at(k)
    }

    /// `τ_k = λ_k(1 − αλ_k)/α`.
    pub fn tau(&self, k: usize) -> f64 {
        let a = self.alpha();
        let l = self.lambda(k);
        l * (1.0 - a * l) / a
    }

    /// Minimum of `τ_k` over `k < horizon`.
    pub fn tau_min(&self, horizon: usize) -> f64 {
        match self.lambdas.constant() {
            Some(_) => self.tau(0),
            None => (0..horizon.max(1)).map(|k| self.tau(k)).fold(f64::INFINITY, f64::min),
        }
    }

    pub fn validate(&self, beta: f64) -> Result<(), SolveError> {
        let bound = 2.0 * beta * self.epsilon;
        if self.gamma < bound {
            Ok(())
        } else {
            Err(SolveError::StepsizeBound {
                gamma: self.gamma,
                bound,
            })
        }
    }

    pub fn checked_lambda(&self, k: usize) -> Result<f64, SolveError> {
        let lambda = self.lambda(k);
        let upper = 1.0 / self.alpha();
        if lambda > 0.0 && lambda < upper {
            Ok(lambda)
        } else {
            Err(SolveError::Relaxation { k, lambda, upper })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_schedule_is_valid() {
        let s = RelaxationSchedule::default_for(0.5);
        assert_eq!(s.gamma(), 0.5);
        assert!(s.validate(0.5).is_ok());
        assert_relative_eq!(s.epsilon(), 0.5 + 1e-6);
        assert!(s.checked_lambda(3).is_ok());
        let zero_c = RelaxationSchedule::default_for(f64::INFINITY);
        assert_eq!(zero_c.gamma(), 1.0);
        assert!(zero_c.validate(f64::INFINITY).is_ok());
    }

    #[test]
    fn stepsize_at_the_boundary_is_rejected() {
        let s = RelaxationSchedule::new(2.0, 1.0 - 1e-6, Lambdas::default()).unwrap();
        assert!(matches!(s.validate(1.0), Err(SolveError::StepsizeBound { .. })));
    }

    #[test]
    fn tau_matches_definition() {
        let s = RelaxationSchedule::new(1.0, 0.5, Lambdas::Constant(1.0)).unwrap();
        // alpha = 2/3, tau = 1·(1 − 2/3)/(2/3) = 1/2
        assert_relative_eq!(s.tau(0), 0.5, epsilon = 1e-15);
        let s = RelaxationSchedule::new(1.0, 0.5, Lambdas::Constant(1.5)).unwrap();
        assert!(s.checked_lambda(0).is_err());
    }
}

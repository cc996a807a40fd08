use std::fmt;
use std::sync::Arc;

use crate::numkit::RealVector;
use crate::operators::{ForwardOperator, ProxOperator};

pub type ValueFn = Arc<dyn Fn(&RealVector) -> f64 + Send + Sync>;

/// Value callables for `f`, `g`, `h` with `A = ∂f`, `B = ∂g`, `C = ∇h`.
#[derive(Clone)]
pub struct Objective {
    pub f: ValueFn,
    pub g: ValueFn,
    pub h: ValueFn,
}

impl Objective {
    pub fn new<F, G, H>(f: F, g: G, h: H) -> Self
    where
        F: Fn(&RealVector) -> f64 + Send + Sync + 'static,
        G: Fn(&RealVector) -> f64 + Send + Sync + 'static,
        H: Fn(&RealVector) -> f64 + Send + Sync + 'static,
    {
        Self {
            f: Arc::new(f),
            g: Arc::new(g),
            h: Arc::new(h),
        }
    }

    /// `f(x_A) + g(x_B) + h(x_B)`; finite whenever `f` and `g` are
    /// indicators, since each point lies in its own domain.
    pub fn split_value(&self, x_a: &RealVector, x_b: &RealVector) -> f64 {
        (self.f)(x_a) + (self.g)(x_b) + (self.h)(x_b)
    }

    pub fn value(&self, x: &RealVector) -> f64 {
        (self.f)(x) + (self.g)(x) + (self.h)(x)
    }
}

pub fn zero_value() -> ValueFn {
    Arc::new(|_| 0.0)
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Objective { f, g, h }")
    }
}

/// The inclusion `0 ∈ Ax + Bx + Cx` over `R^dim`.
#[derive(Clone, Debug)]
pub struct ThreeOperatorProblem {
    pub a: ProxOperator,
    pub b: ProxOperator,
    pub c: ForwardOperator,
    pub objective: Option<Objective>,
    pub reference_solution: Option<RealVector>,
    dim: usize,
}

impl ThreeOperatorProblem {
    pub fn new(dim: usize, a: ProxOperator, b: ProxOperator, c: ForwardOperator) -> Self {
        Self {
            a,
            b,
            c,
            objective: None,
            reference_solution: None,
            dim,
        }
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = Some(objective);
        self
    }

    pub fn with_reference(mut self, x_star: RealVector) -> Self {
        self.reference_solution = Some(x_star);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn beta(&self) -> f64 {
        self.c.beta()
    }
}

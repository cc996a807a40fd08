//! Maximal monotone operators given by their resolvents, and cocoercive
//! forward operators, each tagged with the regularity constants the stepsize
//! rules consume. Unknown strong-monotonicity moduli are 0, unknown Lipschitz
//! constants are infinite.

mod forward;
mod prox;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::numkit::{NumError, RealVector};

pub use forward::{compose_gradient, grad_feasibility, grad_quadratic};
pub use prox::{
    make_quadratic_prox, project_box, project_halfspace, project_hyperplane, project_simplex, project_subspace,
    prox_l1, prox_nuclear, prox_scaled_sq,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpError {
    #[error("invalid box bounds at component {index}: lower > upper")]
    InvalidBounds { index: usize },
    #[error("normal vector must be nonzero")]
    ZeroNormal,
    #[error("weight must be positive, got {0}")]
    NonPositiveWeight(f64),
    #[error("stepsize must be positive and finite, got {0}")]
    NonPositiveStep(f64),
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("matrix must be symmetric")]
    NotSymmetric,
    #[error("operator {label} returned a non-finite value")]
    NonFinite { label: String },
    #[error(transparent)]
    Num(#[from] NumError),
}

pub type ResolventFn = dyn Fn(f64, &RealVector) -> Result<RealVector, OpError> + Send + Sync;
pub type ForwardFn = dyn Fn(&RealVector) -> Result<RealVector, OpError> + Send + Sync;

/// What is known about the structure of a resolvent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolventKind {
    General,
    /// Projection onto a closed convex set (γ-independent).
    Projection,
    /// Orthogonal projection onto a linear subspace.
    LinearProjection,
}

/// Maximal monotone operator represented by `(γ, z) ↦ (I + γA)⁻¹ z`.
#[derive(Clone)]
pub struct ProxOperator {
    resolvent: Arc<ResolventFn>,
    mu: f64,
    lipschitz: f64,
    label: String,
    kind: ResolventKind,
}

impl ProxOperator {
    /// Wraps a user resolvent. The callable must be pure.
    pub fn new<F>(label: impl Into<String>, mu: f64, lipschitz: f64, resolvent: F) -> Self
    where
        F: Fn(f64, &RealVector) -> Result<RealVector, OpError> + Send + Sync + 'static,
    {
        Self {
            resolvent: Arc::new(resolvent),
            mu,
            lipschitz,
            label: label.into(),
            kind: ResolventKind::General,
        }
    }

    /// The zero operator (normal cone of the whole space): identity resolvent.
    pub fn zero() -> Self {
        Self::new("zero", 0.0, 0.0, |_, z| Ok(z.clone())).with_kind(ResolventKind::LinearProjection)
    }

    pub fn with_kind(mut self, kind: ResolventKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_constants(mut self, mu: f64, lipschitz: f64) -> Self {
        self.mu = mu;
        self.lipschitz = lipschitz;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Evaluates `J_{γA}(z)`, checking the output shape and finiteness.
    pub fn resolve(&self, gamma: f64, z: &RealVector) -> Result<RealVector, OpError> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(OpError::NonPositiveStep(gamma));
        }
        let out = (self.resolvent)(gamma, z)?;
        if out.dim() != z.dim() {
            return Err(OpError::Dimension {
                context: "resolvent output",
                expected: z.dim(),
                found: out.dim(),
            });
        }
        if !out.is_finite() {
            return Err(OpError::NonFinite {
                label: self.label.clone(),
            });
        }
        Ok(out)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> ResolventKind {
        self.kind
    }
}

impl fmt::Debug for ProxOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProxOperator")
            .field("label", &self.label)
            .field("mu", &self.mu)
            .field("lipschitz", &self.lipschitz)
            .field("kind", &self.kind)
            .finish()
    }
}

/// Single-valued β-cocoercive operator.
#[derive(Clone)]
pub struct ForwardOperator {
    forward: Arc<ForwardFn>,
    beta: f64,
    mu_c: f64,
    l_c: f64,
    label: String,
}

impl ForwardOperator {
    /// Wraps a user forward map with cocoercivity `beta`; the Lipschitz
    /// constant defaults to `1/beta`.
    pub fn new<F>(label: impl Into<String>, beta: f64, forward: F) -> Self
    where
        F: Fn(&RealVector) -> Result<RealVector, OpError> + Send + Sync + 'static,
    {
        Self {
            forward: Arc::new(forward),
            beta,
            mu_c: 0.0,
            l_c: 1.0 / beta,
            label: label.into(),
        }
    }

    /// The zero map; cocoercive for every β.
    pub fn zero() -> Self {
        Self::new("zero", f64::INFINITY, |x| Ok(RealVector::zeros(x.dim())))
    }

    /// `x ↦ x`, the gradient of `½‖x‖²`.
    pub fn identity() -> Self {
        Self::new("identity", 1.0, |x| Ok(x.clone())).with_strong_monotonicity(1.0)
    }

    pub fn with_strong_monotonicity(mut self, mu_c: f64) -> Self {
        self.mu_c = mu_c;
        self
    }

    pub fn with_lipschitz(mut self, l_c: f64) -> Self {
        self.l_c = l_c;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn apply(&self, x: &RealVector) -> Result<RealVector, OpError> {
        let out = (self.forward)(x)?;
        if out.dim() != x.dim() {
            return Err(OpError::Dimension {
                context: "forward operator output",
                expected: x.dim(),
                found: out.dim(),
            });
        }
        if !out.is_finite() {
            return Err(OpError::NonFinite {
                label: self.label.clone(),
            });
        }
        Ok(out)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mu_c(&self) -> f64 {
        self.mu_c
    }

    pub fn l_c(&self) -> f64 {
        self.l_c
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for ForwardOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ForwardOperator")
            .field("label", &self.label)
            .field("beta", &self.beta)
            .field("mu_c", &self.mu_c)
            .field("l_c", &self.l_c)
            .finish()
    }
}

pub(crate) fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<(), OpError> {
    if expected == found {
        Ok(())
    } else {
        Err(OpError::Dimension {
            context,
            expected,
            found,
        })
    }
}

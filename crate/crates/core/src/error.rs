use thiserror::Error;

use crate::numkit::NumError;
use crate::operators::OpError;

/// Errors raised by the iterative solvers and their diagnostics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("gamma = {gamma} must be < 2·beta·epsilon = {bound}")]
    StepsizeBound { gamma: f64, bound: f64 },
    #[error("relaxation lambda_{k} = {lambda} outside (0, {upper})")]
    Relaxation { k: usize, lambda: f64, upper: f64 },
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("non-finite iterate at step {k}")]
    NonFinite { k: usize },
    #[error("diverged at step {k}: fpr² {fpr_sq:e} stayed above 10× its running minimum {running_min:e}")]
    Diverged { k: usize, fpr_sq: f64, running_min: f64 },
    #[error("line search reached rho = {rho_min:e} without acceptance at step {k}")]
    LineSearchFailed { k: usize, rho_min: f64 },
    #[error("missing {0}")]
    Missing(&'static str),
    #[error(transparent)]
    Operator(#[from] OpError),
    #[error(transparent)]
    Num(#[from] NumError),
}

impl SolveError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Self::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<(), Self> {
        if expected == found {
            Ok(())
        } else {
            Err(Self::Dimension {
                context,
                expected,
                found,
            })
        }
    }

    /// True for failures that mean the iteration blew up rather than that the
    /// input was rejected.
    pub fn is_divergence(&self) -> bool {
        matches!(
            self,
            Self::NonFinite { .. }
                | Self::Diverged { .. }
                | Self::LineSearchFailed { .. }
                | Self::Operator(OpError::NonFinite { .. })
        )
    }
}

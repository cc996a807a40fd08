//! Three-operator splitting for `0 ∈ Ax + Bx + Cx` with `C` cocoercive:
//! the basic relaxed iteration, accelerated and line-search variants, ADMM
//! derived from the dual, application constructors, and numerical
//! certification of the convergence theory.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admm;
pub mod applications;
pub mod batch;
pub mod corpus;
pub mod diagnostics;
pub mod error;
pub mod numkit;
pub mod operators;
pub mod splitting;
pub mod variants;

pub use error::SolveError;

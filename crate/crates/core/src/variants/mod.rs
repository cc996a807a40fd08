//! Accelerated stepsizes, backtracking line search and ergodic averaging.

mod accel;
mod ergodic;
mod linesearch;

pub use accel::{
    next_stepsize_cocoercive, next_stepsize_lipschitz, solve_accelerated, AccelBranch, AccelConfig, AccelIterate,
    AccelSolver, DEFAULT_ETA,
};
pub use ergodic::{ergodic_update, AveragingMode, ErgodicAccumulator};
pub use linesearch::{apply_t_rho, find_rho, solve_linesearch, LineSearchOutcome, ACCEPT_SLACK, RHO_MIN};

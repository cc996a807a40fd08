//! Problem-class constructors for the standard applications of the
//! three-operator scheme, and the primal-dual forms of the iteration.

mod completion;
mod feasibility;
mod inpainting;
mod primal_dual;
mod qp;
mod regularized;

pub use completion::{synthetic_low_rank, CompletionOutcome, CompletionSpec, Observation};
pub use feasibility::{solve_split_feasibility, split_feasibility_problem, FeasibilityOutcome};
pub use inpainting::{texture_inpainting, TensorEntry, TensorShape};
pub use primal_dual::{solve_primal_dual, PrimalDualConfig, PrimalDualOutcome, PrimalDualState, PrimalDualVariant};
pub use qp::{solve_constrained_qp, QpSpec};
pub use regularized::{solve_multi_reg, solve_three_objective, MultiReg, MultiRegOutcome, ThreeObjective};

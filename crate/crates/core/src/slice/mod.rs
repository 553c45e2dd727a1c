//! The nonlinear maximal-slice problem: residual, Newton iteration and
//! amplitude continuation.

pub mod newton;
pub mod residual;

pub use newton::{continuation_solve, newton_solve, IterationRecord, SliceSolution, SolverConfig};
pub use residual::{jacobian_vector, max_q, residual, spacelike_q, Form, Linearization};

//! The linearized operator, its direct and Krylov solvers, and the
//! boundary-data tools built on it.

pub mod banded;
pub mod barrier;
pub mod corrector;
pub mod datum;
pub mod krylov;
pub mod operator;

pub use barrier::{barrier_check, weighted_bound, BarrierReport, WeightedBound};
pub use corrector::boundary_corrector;
pub use datum::{BoundaryDatum, DatumKind};
pub use krylov::{KrylovOptions, KrylovReport};
pub use operator::{apply_l, LinearOperator, LinearSolveReport};

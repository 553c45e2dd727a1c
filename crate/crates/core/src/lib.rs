//! Maximal spacelike slices of anti-de Sitter space, written as height
//! graphs `t = u(x)` over the ball model of hyperbolic space.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod ball;
pub mod error;
pub mod exact;
pub mod field;
pub mod geometry;
pub mod linear;
pub mod samples;
pub mod slice;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use ball::{ambient_embed, coordinate_factors, minkowski_inner, rescale_map, AmbientVector, BallPoint, CoordinateFactors};
pub use error::{Error, Result};
pub use field::{Grid, GridMode, GridSpec, ScalarField, VectorField};

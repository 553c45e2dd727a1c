//! Polar grids over the closed ball, discrete fields and their operators.

pub mod angular;
pub mod csv;
pub mod grid;
pub mod norms;
pub mod ops;
pub mod quadrature;
pub mod radial;
pub mod scalar;

pub use angular::{AngularBasis, AngularKind, Harmonic};
pub use grid::{Grid, GridMode, GridSpec, Node};
pub use norms::{decay_exponent, weighted_norm, DecayFit, WeightedNormReport};
pub use ops::Spectrum;
pub use scalar::{ScalarField, VectorField};

//! Near-boundary extension of boundary data that `L` maps to `O(tau^4)`.

use std::sync::Arc;

use super::datum::BoundaryDatum;
use crate::error::Result;
use crate::field::ops::sphere_laplacian;
use crate::field::{Grid, ScalarField};

/// Below this `tau` the corrector is the pure expansion.
pub const TAU_BLEND: f64 = 0.1;
/// At the center it is the angular mean of the datum.
pub const TAU_FLAT: f64 = 0.5;

/// `C^infinity` step: 1 for `tau <= TAU_BLEND`, 0 for `tau >= TAU_FLAT`.
pub fn blend(tau: f64) -> f64 {
    let s = (tau - TAU_BLEND) / (TAU_FLAT - TAU_BLEND);
    if s <= 0.0 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    let e = |x: f64| (-1.0 / x).exp();
    e(1.0 - s) / (e(s) + e(1.0 - s))
}

/// `phi + rho^2 / (2(n - 1)) Delta_S phi` near the boundary, blended to the
/// mean of `phi` inside.
pub fn boundary_corrector_values(grid: &Arc<Grid>, phi: &[f64]) -> ScalarField {
    let b = grid.angular();
    let mean = b.mean(phi);
    let lap = sphere_laplacian(b, phi);
    let c = 1.0 / (2.0 * (grid.dim() as f64 - 1.0));
    let mut f = ScalarField::from_fn(grid, |n| {
        let chi = blend(n.tau);
        if chi == 0.0 {
            return mean;
        }
        let rho = (n.tau / n.r).asinh();
        mean + chi * (phi[n.angle] - mean + c * rho * rho * lap[n.angle])
    });
    f.boundary_mut().copy_from_slice(phi);
    f
}

pub fn boundary_corrector(grid: &Arc<Grid>, datum: &BoundaryDatum) -> Result<ScalarField> {
    Ok(boundary_corrector_values(grid, &datum.sample(grid)?))
}

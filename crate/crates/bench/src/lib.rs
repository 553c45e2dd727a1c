//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use adsslice::exact::{geodesic_field, GeodesicSliceSpec};
use adsslice::linear::BoundaryDatum;
use adsslice::{Grid, GridSpec, ScalarField};

pub fn grid(n_r: usize, n_theta: usize) -> Arc<Grid> {
    Grid::new(GridSpec::axisymmetric(n_r, n_theta)).expect("valid grid")
}

pub fn geodesic(g: &Arc<Grid>) -> ScalarField {
    geodesic_field(&GeodesicSliceSpec::new(0.0, 0.0, 0.3, 0.0).expect("spacelike"), g).expect("on grid")
}

/// `(3 cos^2 theta - 1) / 2`.
pub fn degree_two() -> BoundaryDatum {
    BoundaryDatum::harmonic(&[(2, 0, 1.0)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        let g = grid(16, 8);
        assert!(geodesic(&g).sup_norm() > 0.0);
        assert_eq!(degree_two().sample(&g).unwrap().len(), 8);
    }
}

use adsslice::exact::{boundary_trace, fit_geodesic_trace, geodesic_field, GeodesicSliceSpec, FIT_TOLERANCE};
use adsslice::geometry::GeometryReport;
use adsslice::linear::BoundaryDatum;
use adsslice::samples::{random_spacelike_field, rng};
use adsslice::slice::{continuation_solve, residual, Form, SolverConfig};
use adsslice::{Grid, GridSpec, ScalarField};
use proptest::prelude::*;

fn solve_in_pool(threads: usize) -> (Vec<f64>, Vec<f64>) {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        let g = Grid::new(GridSpec::ball(12, 6, 8)).unwrap();
        let d: BoundaryDatum = "harmonic:2,1:1.0;1,0:0.5".parse().unwrap();
        let s = continuation_solve(&g, &d, 0.01, &SolverConfig::default()).unwrap();
        let r = GeometryReport::compute(&s.u).unwrap();
        (s.u.values().to_vec(), r.sff.h2.values().to_vec())
    })
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let one = solve_in_pool(1);
    let four = solve_in_pool(4);
    assert_eq!(one, four);
}

#[test]
fn timelike_data_fail_cleanly() {
    let g = Grid::new(GridSpec::axisymmetric(16, 8)).unwrap();
    let d = BoundaryDatum::harmonic(&[(6, 0, 1.0)]);
    let cfg = SolverConfig { steps: 2, ..Default::default() };
    assert!(continuation_solve(&g, &d, 100.0, &cfg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn scaling_identity_holds(seed in 0u64..10_000, eps in 0.01f64..1.0, q in 0.1f64..0.9) {
        let g = Grid::new(GridSpec::disk(16, 16)).unwrap();
        let u = random_spacelike_field(&g, &mut rng(seed), q).unwrap();
        let lhs = residual(&u.scaled(eps.sqrt()), Form::Maximal, 0.05).unwrap();
        let rhs = residual(&u, Form::Rescaled { eps }, 0.05).unwrap().scaled(eps.sqrt());
        let d = lhs.axpy(-1.0, &rhs).unwrap().sup_norm();
        prop_assert!(d <= 1e-12 * (1.0 + lhs.sup_norm()));
    }

    #[test]
    fn geodesic_heights_are_spacelike(c in -0.9f64..0.9, w0 in -3.0f64..3.0) {
        let spec = GeodesicSliceSpec::new(0.0, 0.0, c, w0).unwrap();
        let g = Grid::new(GridSpec::axisymmetric(16, 8)).unwrap();
        let u = geodesic_field(&spec, &g).unwrap();
        prop_assert!(residual(&u, Form::Maximal, 1e-3).is_ok());
        let (w, _) = boundary_trace(&spec, &g);
        prop_assert!(fit_geodesic_trace(g.angular(), &w, FIT_TOLERANCE).totally_geodesic);
    }

    #[test]
    fn adding_a_constant_changes_nothing(shift in -3.0f64..3.0, seed in 0u64..1000) {
        let g = Grid::new(GridSpec::axisymmetric(16, 8)).unwrap();
        let u = random_spacelike_field(&g, &mut rng(seed), 0.5).unwrap();
        let v = u.axpy(1.0, &ScalarField::constant(&g, shift)).unwrap();
        let a = residual(&u, Form::Maximal, 0.05).unwrap();
        let b = residual(&v, Form::Maximal, 0.05).unwrap();
        prop_assert!(a.axpy(-1.0, &b).unwrap().sup_norm() < 1e-10 * (1.0 + a.sup_norm()));
    }
}

use adsslice::linear::operator::l_of_tau_power;
use adsslice::linear::{KrylovOptions, LinearOperator};
use adsslice::slice::{continuation_solve, residual, Form, Linearization, SolverConfig};
use adsslice::ScalarField;
use adsslice_bench::{degree_two, geodesic, grid};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn linear_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("linear_solve");
    for (n_r, n_t) in [(32, 16), (64, 32), (128, 64)] {
        let g = grid(n_r, n_t);
        let op = LinearOperator::new(&g).unwrap();
        let eta = ScalarField::from_fn(&g, |n| l_of_tau_power(3, 2.0, n.tau));
        let zero = vec![0.0; g.n_angular()];
        group.bench_with_input(BenchmarkId::from_parameter(format!("{n_r}x{n_t}")), &eta, |b, eta| {
            b.iter(|| op.solve(eta, &zero, KrylovOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn residual_and_jacobian(c: &mut Criterion) {
    let g = grid(64, 32);
    let u = geodesic(&g);
    c.bench_function("residual/64x32", |b| b.iter(|| residual(&u, Form::Maximal, 0.05).unwrap()));
    let lin = Linearization::new(&u, Form::Maximal, 0.05).unwrap();
    c.bench_function("jacobian_vector/64x32", |b| b.iter(|| lin.apply(&u)));
}

fn continuation(c: &mut Criterion) {
    let mut group = c.benchmark_group("continuation_solve");
    group.sample_size(10);
    for (n_r, n_t) in [(32, 16), (64, 32)] {
        let g = grid(n_r, n_t);
        group.bench_function(format!("{n_r}x{n_t}"), |b| {
            b.iter(|| continuation_solve(&g, &degree_two(), 0.0025, &SolverConfig::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, linear_solve, residual_and_jacobian, continuation);
criterion_main!(benches);

use adsslice::geometry::{gauss_check, second_fundamental_form, GeometryReport};
use adsslice_bench::{geodesic, grid};
use criterion::{criterion_group, criterion_main, Criterion};

fn geometry(c: &mut Criterion) {
    let mut group = c.benchmark_group("geometry");
    group.sample_size(10);
    let g = grid(64, 32);
    let u = geodesic(&g);
    group.bench_function("second_fundamental_form/64x32", |b| b.iter(|| second_fundamental_form(&u).unwrap()));
    group.bench_function("gauss_check/64x32", |b| b.iter(|| gauss_check(&u).unwrap()));
    group.bench_function("report/64x32", |b| b.iter(|| GeometryReport::compute(&u).unwrap()));
    group.finish();
}

criterion_group!(benches, geometry);
criterion_main!(benches);

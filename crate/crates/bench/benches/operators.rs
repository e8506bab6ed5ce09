use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use paradiff::{apply_direct, apply_split, maximal_function, FourierPlan, MaximalParams};
use paradiff_bench::fixture;

fn fourier(c: &mut Criterion) {
    let mut group = c.benchmark_group("forward_fourier");
    for depth in [8, 10, 12] {
        let grid = paradiff::make_grid(1, depth).unwrap();
        let plan = FourierPlan::new(grid);
        let u = paradiff::random::random_grid_function(grid, 1);
        group.bench_with_input(BenchmarkId::from_parameter(depth), &u, |b, u| b.iter(|| plan.forward(u)));
    }
    group.finish();
}

fn operators(c: &mut Criterion) {
    let mut group = c.benchmark_group("operators");
    group.sample_size(10);
    for depth in [7, 9] {
        let f = fixture(depth);
        group.bench_function(BenchmarkId::new("apply_direct", depth), |b| {
            b.iter(|| apply_direct(&f.symbol, &f.input).unwrap())
        });
        group.bench_function(BenchmarkId::new("apply_split", depth), |b| {
            b.iter(|| apply_split(&f.symbol, &f.input, &f.partition).unwrap())
        });
    }
    group.finish();
}

fn maximal(c: &mut Criterion) {
    let mut group = c.benchmark_group("maximal_function");
    for depth in [8, 10] {
        let f = fixture(depth);
        let params = MaximalParams::dyadic(f.input.grid(), 0.5).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(depth), &f.input, |b, u| {
            b.iter(|| maximal_function(u, &params))
        });
    }
    group.finish();
}

criterion_group!(benches, fourier, operators, maximal);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use derivcalc_bench::{apply_input, gcd_pair, grid, operator_pair, word};
use derivcalc_core::exactnum::poly_gcd;
use derivcalc_core::reconstruct::reconstruct_operator;
use std::hint::black_box;

fn gcd(c: &mut Criterion) {
    let mut group = c.benchmark_group("gcd");
    for degree in [2, 4, 6] {
        let (a, b) = gcd_pair(degree);
        group.bench_with_input(BenchmarkId::from_parameter(degree), &(a, b), |bench, (a, b)| {
            bench.iter(|| poly_gcd(black_box(a), black_box(b)))
        });
    }
    group.finish();
}

fn normalize(c: &mut Criterion) {
    let mut group = c.benchmark_group("normalize");
    for len in 1..=4 {
        let w = word(len);
        group.bench_with_input(BenchmarkId::from_parameter(len), &w, |bench, w| {
            bench.iter(|| black_box(w).normalize().unwrap())
        });
    }
    group.finish();
}

fn compose(c: &mut Criterion) {
    let mut group = c.benchmark_group("compose");
    for degree in 1..=3 {
        let (e1, e2) = operator_pair(degree);
        group.bench_with_input(BenchmarkId::from_parameter(degree), &(e1, e2), |bench, (e1, e2)| {
            bench.iter(|| black_box(e1).compose(black_box(e2)).unwrap())
        });
    }
    group.finish();
}

fn apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply");
    for degree in 1..=3 {
        let (e, f) = apply_input(degree);
        group.bench_with_input(BenchmarkId::from_parameter(degree), &(e, f), |bench, (e, f)| {
            bench.iter(|| black_box(e).apply(black_box(f)).unwrap())
        });
    }
    group.finish();
}

fn reconstruct(c: &mut Criterion) {
    let mut group = c.benchmark_group("reconstruct");
    for degree in 1..=3 {
        let g = grid(degree);
        group.bench_with_input(BenchmarkId::from_parameter(degree), &g, |bench, g| {
            bench.iter(|| reconstruct_operator(black_box(g)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, gcd, normalize, compose, apply, reconstruct);
criterion_main!(benches);

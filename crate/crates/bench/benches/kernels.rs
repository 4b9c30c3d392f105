use std::cmp::Ordering;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DMatrix;

use kitaev_de::entropy::block_de_series;
use kitaev_de::gaussian::{dense_ground_state, kernel};
use kitaev_de::model::Boundary;
use kitaev_de::{
    block_diagonal_distribution, pfaffian, pure_state_de, solve_chain, winding_number, Basis, CorrelationSource, Decay,
    ModelSpec,
};

fn v1(alpha: Decay) -> ModelSpec {
    ModelSpec::long_range_pairing(1.0, 1.0, 0.5, alpha)
}

fn v2() -> ModelSpec {
    ModelSpec::long_range_pairing_hopping(-0.8, 1.0, -0.6, Decay::Power(0.2), Decay::Power(0.2), 3)
}

fn momentum(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_chain");
    for (name, spec) in [("v1_inf", v1(Decay::Infinite)), ("v1_alpha1.5", v1(Decay::Power(1.5))), ("v2", v2())] {
        g.bench_with_input(BenchmarkId::new(name, 2000), &spec, |b, s| b.iter(|| solve_chain(black_box(s), 2000)));
    }
    g.finish();
    c.bench_function("pure_state_de/v2/2000", |b| b.iter(|| pure_state_de(black_box(&v2()), 2000)));
    c.bench_function("winding/v2/4096", |b| b.iter(|| winding_number(black_box(&v2()), 4096)));
}

fn correlators(c: &mut Criterion) {
    c.bench_function("kernel/v1_alpha0/8192", |b| b.iter(|| kernel(black_box(&v1(Decay::Power(0.0))), 8192, 14)));
    let src = CorrelationSource::Toeplitz(kernel(&v2(), 8192, 14).unwrap());
    let mut g = c.benchmark_group("block_distribution");
    g.sample_size(20);
    for l in [8usize, 12, 14] {
        for basis in [Basis::Z, Basis::X] {
            g.bench_with_input(BenchmarkId::new(format!("{basis:?}"), l), &l, |b, &l| {
                b.iter(|| block_diagonal_distribution(&src, l, basis))
            });
        }
    }
    g.finish();
    let mut g = c.benchmark_group("block_series");
    g.sample_size(10);
    g.bench_function("v2/4..=14", |b| {
        let ls: Vec<usize> = (4..=14).collect();
        b.iter(|| block_de_series(black_box(&v2()), &ls, Basis::Z, 8192))
    });
    g.finish();
}

fn dense(c: &mut Criterion) {
    let mut g = c.benchmark_group("pfaffian");
    for n in [8usize, 16, 28] {
        let m = antisymmetric(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| pfaffian(black_box(m))));
    }
    g.finish();
    let mut g = c.benchmark_group("dense_ground_state");
    g.sample_size(10);
    for n in [100usize, 400] {
        let spec = ModelSpec::long_range_pairing(1.0, 1.0, 1.5, Decay::Power(1.5));
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| dense_ground_state(black_box(&spec), n, Boundary::Open))
        });
    }
    g.finish();
}

/// Deterministic antisymmetric test matrix.
fn antisymmetric(n: usize) -> DMatrix<f64> {
    let upper = |i: usize, j: usize| ((i * 31 + j * 17) % 13) as f64 / 13.0 - 0.5;
    DMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        Ordering::Less => upper(i, j),
        Ordering::Greater => -upper(j, i),
        Ordering::Equal => 0.0,
    })
}

criterion_group!(benches, momentum, correlators, dense);
criterion_main!(benches);

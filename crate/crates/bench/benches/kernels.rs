use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use doubleprobe_core::{
    cantor_space, chain_metric, doubling_constant, evenly_spaced, exponent_q, geometric_doubling_profile,
    greedy_separated, log_line, max_separated_exact, quasi_constant, theorem3_witness, torus_grid, DistanceMatrix,
    MetricKind, ProductMetricSpec, TorusSample,
};

fn log_line_matrix(n: usize) -> DistanceMatrix {
    let xs: Vec<f64> = (0..n).map(|i| -10.0 + 20.0 * i as f64 / (n - 1) as f64).collect();
    log_line(&xs).unwrap()
}

fn metrization(c: &mut Criterion) {
    let mut g = c.benchmark_group("metrization");
    for n in [50, 100, 200] {
        let m = log_line_matrix(n);
        g.bench_with_input(BenchmarkId::new("quasi_constant", n), &m, |b, m| b.iter(|| quasi_constant(black_box(m))));
        let q = exponent_q(quasi_constant(&m)).unwrap();
        g.bench_with_input(BenchmarkId::new("chain_metric", n), &m, |b, m| {
            b.iter(|| chain_metric(black_box(m), q).unwrap())
        });
    }
    g.finish();
}

fn packing(c: &mut Criterion) {
    let mut g = c.benchmark_group("packing");
    let cantor = cantor_space(6).unwrap();
    g.bench_function("exact_cantor_64", |b| b.iter(|| max_separated_exact(cantor.metric(), black_box(0.05)).unwrap()));
    let torus =
        TorusSample::new(torus_grid(2, 6).unwrap(), ProductMetricSpec { kind: MetricKind::Sup, weights: Vec::new() })
            .unwrap();
    g.bench_function("greedy_torus_4096", |b| b.iter(|| greedy_separated(&torus, black_box(1.0 / 32.0)).unwrap()));
    let line = log_line(&evenly_spaced(-4.0, 4.0, 200).unwrap()).unwrap();
    g.bench_function("cover_profile_log_line", |b| {
        b.iter(|| geometric_doubling_profile(&line, black_box(&[0.5, 1.0, 2.0])).unwrap())
    });
    g.finish();
}

fn measure(c: &mut Criterion) {
    let cantor = cantor_space(10).unwrap();
    let radii: Vec<f64> = (1..=8).map(|l| 0.5f64.powi(l)).collect();
    c.bench_function("doubling_cantor_1024", |b| b.iter(|| doubling_constant(&cantor, black_box(&radii)).unwrap()));
}

fn miranda(c: &mut Criterion) {
    let mut g = c.benchmark_group("miranda");
    g.sample_size(10);
    let spec = ProductMetricSpec { kind: MetricKind::WeightedSum, weights: Vec::new() };
    g.bench_function("theorem3_n2_j2", |b| b.iter(|| theorem3_witness(2, 2, spec.clone().into(), 32, 1e-3).unwrap()));
    g.finish();
}

criterion_group!(benches, metrization, packing, measure, miranda);
criterion_main!(benches);

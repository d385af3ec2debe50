use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rqboost::anneal::{brute_force_solve, simulated_anneal, SolverConfig};
use rqboost_bench::random_qubo;
use std::hint::black_box;

fn brute_force(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_force");
    for n in [12, 16, 20] {
        let q = random_qubo(n, 0.5, n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &q, |b, q| b.iter(|| brute_force_solve(black_box(q))));
    }
    group.finish();
}

fn annealing(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulated_anneal");
    let cfg = SolverConfig::default();
    for n in [16, 64, 256] {
        let q = random_qubo(n, 0.5, n as u64);
        group.bench_with_input(BenchmarkId::from_parameter(n), &q, |b, q| b.iter(|| simulated_anneal(black_box(q), &cfg)));
    }
    group.finish();
}

criterion_group!(benches, brute_force, annealing);
criterion_main!(benches);

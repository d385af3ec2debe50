use criterion::{criterion_group, criterion_main, Criterion};
use rqboost::anneal::SolverConfig;
use rqboost::baselines::{forest_fit, logistic_fit, ForestConfig, LogisticOptions, Penalty};
use rqboost::boost::{qboost_train, OracleConfig, QBoostConfig};
use rqboost::datasets::{bundled_names, names_weak_pool, PositiveClass};
use rqboost_bench::random_classification;
use std::hint::black_box;

fn forest(c: &mut Criterion) {
    let (x, y) = random_classification(400, 50, 7);
    let cfg = ForestConfig { trees: 50, ..Default::default() };
    let mut group = c.benchmark_group("forest");
    group.sample_size(10);
    group.bench_function("fit_50_trees_400x50", |b| b.iter(|| forest_fit(black_box(&x), &y, &cfg)));
    group.finish();
}

fn logistic(c: &mut Criterion) {
    let (x, y) = random_classification(400, 50, 8);
    let opts = LogisticOptions::default();
    c.bench_function("logistic_l1_400x50", |b| b.iter(|| logistic_fit(black_box(&x), &y, Penalty::L1, 0.01, &opts)));
}

fn qboost(c: &mut Criterion) {
    let data = bundled_names(PositiveClass::Female);
    let pool = names_weak_pool();
    let cfg = QBoostConfig {
        oracle: OracleConfig::SimulatedAnnealing { solver: SolverConfig::default() },
        ..Default::default()
    };
    let mut group = c.benchmark_group("qboost");
    group.sample_size(10);
    group.bench_function("names_sa", |b| b.iter(|| qboost_train(&pool, black_box(&data), &data, &cfg, 0)));
    group.finish();
}

criterion_group!(benches, forest, logistic, qboost);
criterion_main!(benches);

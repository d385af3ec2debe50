use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rqboost::chimera::{clique_embed, heuristic_embed, verify_embedding, ChimeraGraph, ProblemGraph};
use std::hint::black_box;

fn clique(c: &mut Criterion) {
    let mut group = c.benchmark_group("clique_embed");
    for m in [4, 8, 12] {
        let g = ChimeraGraph::perfect(m).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(m), &g, |b, g| b.iter(|| clique_embed(black_box(g))));
    }
    group.finish();

    let g = ChimeraGraph::perfect(12).unwrap();
    let emb = clique_embed(&g).unwrap();
    let k49 = ProblemGraph::complete(49);
    c.bench_function("verify_k49_c12", |b| b.iter(|| verify_embedding(&k49, &g, black_box(&emb))));
}

fn heuristic(c: &mut Criterion) {
    let g = ChimeraGraph::with_random_defects(8, 36, 1).unwrap();
    let k16 = ProblemGraph::complete(16);
    let mut group = c.benchmark_group("heuristic_embed");
    group.sample_size(10);
    group.bench_function("k16_c8_36_defects", |b| b.iter(|| heuristic_embed(&k16, black_box(&g), 0, 1)));
    group.finish();
}

criterion_group!(benches, clique, heuristic);
criterion_main!(benches);

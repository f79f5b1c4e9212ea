use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use degpack::embed::{embed_backtracking, embed_pipeline, PipelineInput, PipelineParams};
use degpack::harness::{gen_bounded_graphic_seq, gen_host_min_degree};
use degpack::{build_bounded_realization, is_graphic, realize_graphic, star_decompose, SimpleGraph};

fn sequences(c: &mut Criterion) {
    let mut group = c.benchmark_group("realization");
    for n in [20usize, 60, 200] {
        let seq = gen_bounded_graphic_seq(n, 5, 7).unwrap();
        group.bench_with_input(BenchmarkId::new("is_graphic", n), &seq, |b, s| b.iter(|| is_graphic(black_box(s))));
        group.bench_with_input(BenchmarkId::new("havel_hakimi", n), &seq, |b, s| {
            b.iter(|| realize_graphic(black_box(s)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("gadgets", n), &seq, |b, s| {
            b.iter(|| build_bounded_realization(black_box(s)))
        });
    }
    group.finish();
}

fn stars(c: &mut Criterion) {
    let mut group = c.benchmark_group("stars");
    for q in [1usize, 2, 3] {
        let g = gen_host_min_degree(100, 1.0 / (q as f64 + 1.0) + 0.05, 3).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(q), &g, |b, g| {
            b.iter(|| star_decompose(black_box(g), q).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let host = gen_host_min_degree(24, 0.6, 11).unwrap();
    let mut matching = SimpleGraph::new(24);
    for i in 0..12 {
        matching.add_edge(2 * i, 2 * i + 1);
    }
    c.bench_function("oracle/perfect_matching_24", |b| {
        b.iter(|| embed_backtracking(black_box(&matching), &host, 1_000_000))
    });
    let sharp = SimpleGraph::complete_bipartite(5, 7);
    let mut m12 = SimpleGraph::new(12);
    for i in 0..6 {
        m12.add_edge(2 * i, 2 * i + 1);
    }
    c.bench_function("oracle/sharpness_12", |b| {
        b.iter(|| embed_backtracking(black_box(&m12), &sharp, 1_000_000))
    });
}

fn pipeline(c: &mut Criterion) {
    let host = gen_host_min_degree(36, 0.6, 5).unwrap();
    let input = PipelineInput::Graphic(gen_bounded_graphic_seq(36, 3, 5).unwrap());
    let params = PipelineParams::default();
    c.bench_function("pipeline/thm13_36", |b| {
        b.iter(|| embed_pipeline(black_box(&host), &input, &params))
    });
}

criterion_group!(benches, sequences, stars, oracle, pipeline);
criterion_main!(benches);

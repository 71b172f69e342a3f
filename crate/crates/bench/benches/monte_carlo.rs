use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fdrelay::MomentSamples;
use fdrelay_bench::two_bit;

fn simulate(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulate_100");
    g.sample_size(10);
    for m in [16, 64, 128] {
        let cfg = two_bit(m);
        g.bench_with_input(BenchmarkId::from_parameter(m), &cfg, |b, cfg| {
            b.iter(|| MomentSamples::simulate(black_box(cfg), 100, 1).unwrap())
        });
    }
    g.finish();
}

fn evaluate(c: &mut Criterion) {
    let cfg = two_bit(32);
    let samples = MomentSamples::simulate(&cfg, 1000, 1).unwrap();
    c.bench_function("rate_from_samples", |b| {
        b.iter(|| samples.rate(black_box(&cfg)).unwrap())
    });
}

criterion_group!(benches, simulate, evaluate);
criterion_main!(benches);

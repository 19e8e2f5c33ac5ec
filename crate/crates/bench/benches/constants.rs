use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sparsekit_core::constants::{coherence, delta_exact, theta_exact, DEFAULT_BUDGET};
use sparsekit_core::{model, Ensemble};
use std::hint::black_box;

fn constants(c: &mut Criterion) {
    let f = model::generate_matrix(20, 40, &Ensemble::Gaussian, true, 1).unwrap();

    let mut g = c.benchmark_group("enumeration_20x40");
    g.sample_size(10);
    for k in [2, 3] {
        g.bench_with_input(BenchmarkId::new("delta", k), &k, |b, &k| {
            b.iter(|| delta_exact(black_box(&f), k, DEFAULT_BUDGET).unwrap())
        });
    }
    g.bench_function("theta_1_2", |b| b.iter(|| theta_exact(black_box(&f), 1, 2, DEFAULT_BUDGET).unwrap()));
    g.bench_function("coherence", |b| b.iter(|| coherence(black_box(&f)).unwrap()));
    g.finish();
}

criterion_group!(benches, constants);
criterion_main!(benches);

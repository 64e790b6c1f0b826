//! One worker against all available workers. Without the `parallel` feature
//! both arms run sequentially, which gives the baseline for comparison.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pairprob::montecarlo::estimate_p_with_workers;
use pairprob::parallel::{default_workers, with_workers};
use pairprob::verification::equivalence_suite;
use pairprob::{BackendKind, Configuration};

fn worker_counts() -> Vec<usize> {
    let mut counts = vec![1, default_workers()];
    counts.dedup();
    counts
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte_carlo_100k");
    group.sample_size(10);
    let cfg = Configuration::new(10, 10);
    for workers in worker_counts() {
        group.bench_with_input(BenchmarkId::from_parameter(workers), &workers, |b, &w| {
            b.iter(|| estimate_p_with_workers(black_box(cfg), 100_000, 7, w).unwrap())
        });
    }
    group.finish();
}

fn equivalence_grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_equivalence_grid_20");
    group.sample_size(10);
    for workers in worker_counts() {
        group.bench_with_input(BenchmarkId::from_parameter(workers), &workers, |b, &w| {
            b.iter(|| with_workers(w, || equivalence_suite(black_box(20), BackendKind::Exact)))
        });
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, equivalence_grid);
criterion_main!(benches);

//! Benchmarks the rayon-backed data-parallel path against the sequential
//! fallback on the three workloads that fan out: a d = 3 measure solve
//! (the solver parallelizes its normal-system assembly), the Bloch-sphere
//! grid oracle, and a divisibility scan over a time grid.
//!
//! Run with `cargo bench --bench parallel_vs_seq`; with
//! `--no-default-features` the rayon rows degrade to the sequential path,
//! which is the point of the comparison.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use mapnorm::channels as ch;
use mapnorm::measures::{diamond_norm, diamond_norm_bloch_oracle, MeasureOptions};
use mapnorm::nonmarkov::{builtin_family, i_dia};
use mapnorm::par::Parallelism;

fn options(par: Parallelism) -> MeasureOptions {
    MeasureOptions {
        parallelism: par,
        ..MeasureOptions::default()
    }
}

fn modes() -> [(&'static str, Parallelism); 2] {
    [
        ("sequential", Parallelism::Sequential),
        ("rayon", Parallelism::Rayon),
    ]
}

fn bench_diamond_norm(c: &mut Criterion) {
    let map = ch::random_tp_map(7, 3).expect("builtin map");
    let mut group = c.benchmark_group("diamond_norm_d3");
    group.sample_size(20);
    for (name, par) in modes() {
        let o = options(par);
        group.bench_with_input(BenchmarkId::from_parameter(name), &o, |b, o| {
            b.iter(|| diamond_norm(&map, o).expect("solve succeeds").value)
        });
    }
    group.finish();
}

fn bench_bloch_oracle(c: &mut Criterion) {
    let map = ch::depolarizing_inverse(0.3, 2).expect("builtin map");
    let mut group = c.benchmark_group("bloch_oracle");
    group.sample_size(10);
    for (name, par) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &par, |b, par| {
            b.iter(|| diamond_norm_bloch_oracle(&map, *par).expect("oracle succeeds"))
        });
    }
    group.finish();
}

fn bench_divisibility_scan(c: &mut Criterion) {
    let family =
        builtin_family("depolarizing_semigroup", &[("gamma", 1.0)]).expect("builtin family");
    let mut group = c.benchmark_group("divisibility_scan");
    group.sample_size(10);
    for (name, par) in modes() {
        let o = options(par);
        group.bench_with_input(BenchmarkId::from_parameter(name), &o, |b, o| {
            b.iter(|| i_dia(&family, 1.0, 6, 1e-3, o).expect("scan succeeds").integral)
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_diamond_norm,
    bench_bloch_oracle,
    bench_divisibility_scan
);
criterion_main!(benches);

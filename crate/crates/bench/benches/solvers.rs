use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nlfront_bench::{heavy_tailed, intermediate, reference, warmed_simulator};
use nlfront_core::criteria::find_ell_star;
use nlfront_core::semiwave::{solve_semiwave_with, SemiWaveOptions};
use nlfront_core::{lambda1, solve_steady};

fn eigen(c: &mut Criterion) {
    let params = reference();
    let mut group = c.benchmark_group("lambda1");
    for l in [1.0, 10.0, 50.0] {
        group.bench_with_input(BenchmarkId::from_parameter(l), &l, |b, &l| {
            b.iter(|| lambda1(black_box(l), &params).unwrap())
        });
    }
    group.finish();
}

fn steady(c: &mut Criterion) {
    let params = reference();
    c.bench_function("steady l=20", |b| {
        b.iter(|| solve_steady(black_box(20.0), &params).unwrap())
    });
}

fn simulate_step(c: &mut Criterion) {
    let sim = warmed_simulator(20.0);
    let dt = sim.params().stable_dt();
    c.bench_function("free boundary step", |b| {
        b.iter_batched_ref(
            || sim.clone(),
            |s| s.step(dt).unwrap(),
            criterion::BatchSize::SmallInput,
        )
    });
}

fn semiwave(c: &mut Criterion) {
    let mut group = c.benchmark_group("semiwave");
    group.sample_size(10);
    let thin = reference();
    group.bench_function("laplace L=60", |b| {
        b.iter(|| solve_semiwave_with(&thin, &SemiWaveOptions::new(0.0, None, 60.0)).unwrap())
    });
    let heavy = heavy_tailed(20);
    group.bench_function("truncated cauchy n=20", |b| {
        b.iter(|| solve_semiwave_with(&heavy, &SemiWaveOptions::new(0.01, Some(20), 60.0)).unwrap())
    });
    group.finish();
}

fn thresholds(c: &mut Criterion) {
    let params = intermediate();
    let mut group = c.benchmark_group("thresholds");
    group.sample_size(10);
    group.bench_function("ell_star", |b| b.iter(|| find_ell_star(&params).unwrap()));
    group.finish();
}

criterion_group!(benches, eigen, steady, simulate_step, semiwave, thresholds);
criterion_main!(benches);

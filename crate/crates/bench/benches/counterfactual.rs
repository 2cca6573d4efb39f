use std::hint::black_box;

use cfl_bench::{workload, Workload};
use cfl_core::inference::{compile_queries, prepare_swip, prepare_twin, Backend, Limits, QueryOptions};
use cfl_core::transform::{construct_twin, swift};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const SIZES: [(usize, usize); 3] = [(20, 4), (40, 4), (80, 8)];

fn workloads() -> Vec<Workload> {
    SIZES.iter().map(|&(n, k)| workload(n, k, 7).expect("benchmark instance")).collect()
}

fn transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("transform");
    for w in workloads() {
        let fix = w.query.intervention();
        group.bench_with_input(BenchmarkId::new("swift", &w.label), &w, |b, w| {
            b.iter(|| swift(black_box(&w.program), &fix).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("twin", &w.label), &w, |b, w| {
            b.iter(|| construct_twin(black_box(&w.program), &fix).unwrap())
        });
    }
    group.finish();
}

fn queries(c: &mut Criterion) {
    let mut group = c.benchmark_group("query");
    group.sample_size(20);
    let opts = QueryOptions::default();
    for w in workloads() {
        let (fix, ev, q) = (w.query.intervention(), w.query.evidence_set(), &w.query.query);
        group.bench_with_input(BenchmarkId::new("swip", &w.label), &w, |b, w| {
            b.iter(|| {
                let prepared = prepare_swip(&w.program, &fix, &ev, q, &opts).unwrap();
                prepared.evaluate::<f64>(Backend::Circuit, &Limits::default())
            })
        });
        group.bench_with_input(BenchmarkId::new("twin", &w.label), &w, |b, w| {
            b.iter(|| {
                let prepared = prepare_twin(&w.program, &fix, &ev, q, &opts).unwrap();
                prepared.evaluate::<f64>(Backend::Circuit, &Limits::default())
            })
        });
    }
    group.finish();
}

fn compilation(c: &mut Criterion) {
    let mut group = c.benchmark_group("compile");
    for w in workloads() {
        let goal = w.query.query.literals().resolve(&w.program).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(&w.label), &w, |b, w| {
            b.iter(|| compile_queries(black_box(&w.program), std::slice::from_ref(&goal), &Limits::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, transforms, queries, compilation);
criterion_main!(benches);

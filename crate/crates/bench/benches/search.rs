use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fraisse_bench::{k4_free_age, k4_free_approximation, parity_age, random_reduct};
use fraisse_core::age::constraints::enumerate_constraints;
use fraisse_core::derived::catalog::{catalog, CatalogName};
use fraisse_core::generic::{grow_generic, DEFAULT_DEMAND_BOUND};
use fraisse_core::{canonical_form, find_embedding, Budget};

fn embedding_search(c: &mut Criterion) {
    let k4 = catalog(CatalogName::K4);
    let mut g = c.benchmark_group("embedding_search");
    for n in [20, 40] {
        let host = k4_free_approximation(n, 1);
        // K4 is absent, so every search is exhaustive.
        g.bench_with_input(BenchmarkId::new("k4_into_k4_free", n), &host, |b, host| {
            b.iter(|| find_embedding(black_box(&k4), host).unwrap())
        });
    }
    g.finish();
}

fn canonical_forms(c: &mut Criterion) {
    let mut g = c.benchmark_group("canonical_form");
    for n in [8, 16] {
        let s = random_reduct(n, 3);
        g.bench_with_input(BenchmarkId::new("tournament_reduct", n), &s, |b, s| {
            b.iter(|| canonical_form(black_box(s)))
        });
    }
    let s = k4_free_approximation(24, 2);
    g.bench_function("k4_free_24", |b| b.iter(|| canonical_form(black_box(&s))));
    g.finish();
}

fn constraint_enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("constraint_enumeration");
    g.sample_size(10);
    for (name, age) in [("k4_free", k4_free_age()), ("parity", parity_age())] {
        g.bench_function(BenchmarkId::new(name, 5), |b| {
            b.iter(|| enumerate_constraints(black_box(&age), 5, Budget::default()).unwrap())
        });
    }
    g.finish();
}

fn generic_growth(c: &mut Criterion) {
    let mut g = c.benchmark_group("generic_growth");
    g.sample_size(10);
    let age = k4_free_age();
    for steps in [20, 40] {
        g.bench_with_input(BenchmarkId::new("k4_free", steps), &steps, |b, &steps| {
            b.iter(|| grow_generic(&age, steps, 7, DEFAULT_DEMAND_BOUND).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, embedding_search, canonical_forms, constraint_enumeration, generic_growth);
criterion_main!(benches);

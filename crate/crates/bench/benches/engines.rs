//! Benchmarks for the counting engines and the verification primitives.
//!
//! Each iteration builds a fresh counter, so the figures include the full
//! memoized recursion tree, not a warm-cache lookup.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use polycount::analysis::{fit_quasipoly, pullback_check};
use polycount::counts::{Counter, Family};
use polycount::exact::{rat_u, Rat};
use polycount::poly::interpolate;

fn bench_counts(c: &mut Criterion) {
    c.bench_function("q_count genus 2, one boundary, mu = 15", |b| {
        b.iter(|| {
            let ct = Counter::new();
            black_box(ct.q_count(2, black_box(&[15])))
        })
    });
    c.bench_function("n_count genus 2, one boundary, mu = 16", |b| {
        b.iter(|| {
            let ct = Counter::new();
            black_box(ct.n_count(2, black_box(&[16])))
        })
    });
    c.bench_function("p_recursive four boundaries, mu = (4,4,4,4)", |b| {
        b.iter(|| {
            let ct = Counter::new();
            black_box(ct.p_recursive(0, black_box(&[4, 4, 4, 4])))
        })
    });
    c.bench_function("p_from_q one-holed torus, mu = 12", |b| {
        b.iter(|| {
            let ct = Counter::new();
            black_box(ct.p_from_q(1, black_box(&[12])))
        })
    });
}

fn bench_analysis(c: &mut Criterion) {
    c.bench_function("interpolate degree-9 univariate", |b| {
        let grids = vec![(0..10u64).map(|t| rat_u(2 * t + 1)).collect::<Vec<Rat>>()];
        let values: Vec<Rat> = grids[0].iter().map(|x| x * x * x + x).collect();
        b.iter(|| black_box(interpolate(black_box(&grids), black_box(&values))))
    });
    c.bench_function("fit pruned counts on the one-holed torus", |b| {
        b.iter(|| {
            let ct = Counter::new();
            black_box(fit_quasipoly(&ct, Family::Q, 1, 1).unwrap().pass)
        })
    });
    c.bench_function("pullback check to order 12", |b| {
        b.iter(|| {
            let ct = Counter::new();
            black_box(pullback_check(&ct, 12).pass)
        })
    });
}

criterion_group!(benches, bench_counts, bench_analysis);
criterion_main!(benches);

// SPDX-License-Identifier: Apache-2.0

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fogscope_bench::{optimize_case, r_grid, simplex_front, simulate_case};
use fogscope_core::model;
use fogscope_core::pareto::{crowding_distance, hypervolume, non_dominated_sort, optimize};
use fogscope_core::sim::simulate;
use fogscope_core::Scenario;

fn objectives(c: &mut Criterion) {
    let s = Scenario::default();
    let grid = r_grid(1001);
    c.bench_function("evaluate_1001_splits", |b| {
        b.iter(|| {
            for &r in &grid {
                black_box(model::evaluate(black_box(&s), r).unwrap());
            }
        })
    });
}

fn pareto_tools(c: &mut Criterion) {
    let mut g = c.benchmark_group("pareto");
    for n in [100, 400] {
        let pts = simplex_front(n);
        g.bench_with_input(BenchmarkId::new("non_dominated_sort", n), &pts, |b, pts| {
            b.iter(|| non_dominated_sort(black_box(pts)))
        });
        g.bench_with_input(BenchmarkId::new("crowding_distance", n), &pts, |b, pts| {
            b.iter(|| crowding_distance(black_box(pts)))
        });
        g.bench_with_input(BenchmarkId::new("hypervolume", n), &pts, |b, pts| {
            b.iter(|| hypervolume(black_box(pts), &[1.1; 3]))
        });
    }
    g.finish();
}

fn optimizer(c: &mut Criterion) {
    let (problem, cfg) = optimize_case(100, 100);
    let mut g = c.benchmark_group("optimize");
    g.sample_size(10);
    g.bench_function("pop100_gen100", |b| {
        b.iter(|| optimize(&problem, black_box(&cfg)).unwrap())
    });
    g.finish();
}

fn simulator(c: &mut Criterion) {
    let s = simulate_case(100.0);
    let mut g = c.benchmark_group("simulate");
    g.sample_size(10);
    g.bench_function("default_r0.5_100s", |b| {
        b.iter(|| simulate(black_box(&s), 1).unwrap())
    });
    g.finish();
}

criterion_group!(benches, objectives, pareto_tools, optimizer, simulator);
criterion_main!(benches);

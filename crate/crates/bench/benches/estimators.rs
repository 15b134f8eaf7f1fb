use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use detsynth_bench::{config, global_workload, local_workload};
use detsynth_core::erm::DEFAULT_ERRONEOUS_CAP;
use detsynth_core::global::{estimate_global_builder, estimate_global_system};
use detsynth_core::local::{estimate_local_builder, estimate_local_system};
use detsynth_core::{erroneous_set, fixtures};

fn global(c: &mut Criterion) {
    let mut group = c.benchmark_group("global");
    for len in [1usize, 2, 3, 4] {
        let work = global_workload(11, 20, &config(len, 2));
        group.bench_with_input(BenchmarkId::new("system", len), &work, |b, work| {
            b.iter(|| {
                for g in work {
                    black_box(estimate_global_system(&g.plant, &g.erm, &g.tau, &g.q0).unwrap());
                }
            })
        });
        group.bench_with_input(BenchmarkId::new("builder", len), &work, |b, work| {
            b.iter(|| {
                for g in work {
                    black_box(estimate_global_builder(&g.plant, &g.erm, &g.tau, &g.q0).unwrap());
                }
            })
        });
    }
    group.finish();
}

fn local(c: &mut Criterion) {
    let mut group = c.benchmark_group("local");
    for len in [1usize, 2, 3, 4] {
        let work = local_workload(12, 20, &config(len, 2));
        group.bench_with_input(BenchmarkId::new("system", len), &work, |b, work| {
            b.iter(|| {
                for l in work {
                    black_box(estimate_local_system(&l.plant, &l.erms, &l.tau, &l.q0).unwrap());
                }
            })
        });
        group.bench_with_input(BenchmarkId::new("builder", len), &work, |b, work| {
            b.iter(|| {
                for l in work {
                    black_box(estimate_local_builder(&l.plant, &l.erms, &l.tau, &l.q0).unwrap());
                }
            })
        });
    }
    group.finish();
}

fn bound(c: &mut Criterion) {
    let mut group = c.benchmark_group("cost_bound");
    for cu in [0u32, 1, 2, 3] {
        let work = global_workload(13, 20, &config(3, cu));
        group.bench_with_input(BenchmarkId::new("global_builder", cu), &work, |b, work| {
            b.iter(|| {
                for g in work {
                    black_box(estimate_global_builder(&g.plant, &g.erm, &g.tau, &g.q0).unwrap());
                }
            })
        });
    }
    group.finish();
}

fn matrix(c: &mut Criterion) {
    let p = fixtures::three_site_plant();
    let erm = fixtures::three_site_erm(&p);
    let w: Vec<_> = ["alpha12", "sigma2", "beta13", "beta13", "gamma3"]
        .iter()
        .map(|n| p.event_id(n).unwrap())
        .collect();
    c.bench_function("erroneous_set", |b| {
        b.iter(|| black_box(erroneous_set(black_box(&w), &erm, DEFAULT_ERRONEOUS_CAP).unwrap()))
    });
}

criterion_group!(benches, global, local, bound, matrix);
criterion_main!(benches);

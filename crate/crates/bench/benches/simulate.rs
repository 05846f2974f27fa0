use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use memstab::simulate::{run_monte_carlo, simulate_path};
use memstab_bench::{feasible_model, sim_config};

fn single_path(c: &mut Criterion) {
    let m = feasible_model(16);
    let cfg = sim_config(1.0 / 1024.0, 10.0, 2);
    c.bench_function("simulate_path 16 modes T=10", |b| {
        b.iter(|| simulate_path(&m, &cfg, black_box(0)).unwrap())
    });
}

fn monte_carlo(c: &mut Criterion) {
    let m = feasible_model(16);
    let cfg = sim_config(1.0 / 1024.0, 2.0, 32);
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.bench_function("32 paths T=2", |b| {
        b.iter(|| run_monte_carlo(&m, &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, single_path, monte_carlo);
criterion_main!(benches);

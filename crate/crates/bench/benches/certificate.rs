use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use memstab::certificate::{
    build_as_certificate, build_certificate, solve_sigma, CertificateOptions,
};
use memstab::model::map_heat_to_problem;
use memstab_bench::feasible_model;

fn sigma(c: &mut Criterion) {
    c.bench_function("solve_sigma", |b| {
        b.iter(|| solve_sigma(black_box(9.8), 4.0, 4.0, 1.0, 1.0, 0.95, 1e-9).unwrap())
    });
}

fn certificate(c: &mut Criterion) {
    let p = map_heat_to_problem(&feasible_model(16)).unwrap();
    let opts = CertificateOptions::default();
    c.bench_function("build_certificate", |b| {
        b.iter(|| build_certificate(black_box(&p), &opts).unwrap())
    });
    let cert = build_certificate(&p, &opts).unwrap();
    c.bench_function("build_as_certificate", |b| {
        b.iter(|| build_as_certificate(black_box(&p), &cert).unwrap())
    });
}

criterion_group!(benches, sigma, certificate);
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use sitdde_core::equilibria::positive_equilibria;
use sitdde_core::{analyze, integrate, linearize, scan, ModelParams, ParamId, ScanConfig, State};

fn reference(tau: f64) -> ModelParams {
    ModelParams::new(18.0, 35.0, 0.19, 0.99, 0.02, 1.5, 0.1, tau).unwrap()
}

fn equilibria(c: &mut Criterion) {
    let p = reference(0.0);
    c.bench_function("positive_equilibria", |b| {
        b.iter(|| positive_equilibria(black_box(&p)).unwrap())
    });
}

fn spectral(c: &mut Criterion) {
    let p = reference(0.0);
    let eq = positive_equilibria(&p).unwrap()[0].location;
    let deltas = linearize(eq, &p).unwrap().deltas;
    c.bench_function("linearize", |b| {
        b.iter(|| linearize(black_box(eq), &p).unwrap())
    });
    c.bench_function("analyze", |b| b.iter(|| analyze(black_box(&deltas), 5)));

    let switching = ModelParams::new(2.0, 5.0, 0.5, 15.0, 1.0, 2.0, 2.0, 0.0).unwrap();
    let eq = positive_equilibria(&switching).unwrap()[0].location;
    let deltas = linearize(eq, &switching).unwrap().deltas;
    c.bench_function("analyze_with_crossings", |b| {
        b.iter(|| analyze(black_box(&deltas), 5))
    });
}

fn simulation(c: &mut Criterion) {
    let p = reference(0.7);
    let x0 = State::new(18.001, 0.007, 0.005);
    c.bench_function("integrate_t50", |b| {
        b.iter(|| integrate(&p, black_box(x0).into(), 50.0, None).unwrap())
    });
}

fn scanning(c: &mut Criterion) {
    let p = ModelParams::new(5.0, 18.0, 2.88, 1.0, 1.5, 1.2, 2.3, 0.7).unwrap();
    let mut cfg = ScanConfig::new(ParamId::C, 2.88, 2.9, 4, State::new(0.7, 0.8, 0.6));
    cfg.t_transient = 50.0;
    cfg.t_sample = 20.0;
    cfg.threads = 1;
    let mut group = c.benchmark_group("scan");
    group.sample_size(10);
    group.bench_function("four_points", |b| {
        b.iter(|| scan(&p, black_box(&cfg)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, equilibria, spectral, simulation, scanning);
criterion_main!(benches);

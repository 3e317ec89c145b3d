use criterion::{black_box, criterion_group, criterion_main, Criterion};

use pushpull_core::dynamics::{integrate_reduced, IntegrationControl};
use pushpull_core::experiment::{run_sweep, RunConfig};
use pushpull_core::grid::FrequencyGrid;
use pushpull_core::loading::{average_loading, loading_report};
use pushpull_core::photon::{gaussian_spectrum, gaussian_time_amplitude};
use pushpull_core::spectral::Rates;
use pushpull_core::{BlochQuadrature, EvalMode, QubitState, ReflectionSpectrum, Scheme};

fn fig6_point() -> (RunConfig, pushpull_core::SystemParams) {
    let cfg = RunConfig::from_preset_name("fig6").unwrap();
    let c = cfg.c_pi(0.0).unwrap();
    let p = cfg.params(Scheme::PushPull, 0.0, c).unwrap();
    (cfg, p)
}

fn spectra(c: &mut Criterion) {
    let (cfg, p) = fig6_point();
    let grid = FrequencyGrid::for_bandwidth(cfg.sigma, 4097).unwrap();
    c.bench_function("reflection spectrum 4097", |b| {
        b.iter(|| ReflectionSpectrum::compute(black_box(&p), &grid, EvalMode::Physical).unwrap())
    });
}

fn loading(c: &mut Criterion) {
    let (cfg, p) = fig6_point();
    let grid = FrequencyGrid::for_bandwidth(cfg.sigma, 4097).unwrap();
    let photon = gaussian_spectrum(cfg.sigma, &grid).unwrap();
    let rs = ReflectionSpectrum::compute(&p, &grid, EvalMode::Physical).unwrap();
    let ifc = cfg.interferometer(Scheme::PushPull).unwrap();
    let quad = BlochQuadrature::default();
    let q = QubitState::from_angles(1.0, 0.5);
    c.bench_function("loading report", |b| {
        b.iter(|| loading_report(&rs, &photon, black_box(&q), &ifc).unwrap())
    });
    c.bench_function("bloch average 100 nodes", |b| {
        b.iter(|| average_loading(black_box(&rs), &photon, &ifc, &quad).unwrap())
    });
}

fn dynamics(c: &mut Criterion) {
    let cfg = RunConfig::from_preset_name("fig5").unwrap();
    let p = cfg.params(Scheme::PushPull, 0.0, cfg.c_pi(0.0).unwrap()).unwrap();
    let rates = Rates::resolve(&p, EvalMode::Physical);
    let ctrl = IntegrationControl::for_gaussian(&rates, cfg.sigma).unwrap();
    let mut group = c.benchmark_group("dynamics");
    group.sample_size(10);
    group.bench_function("reduced fig5", |b| {
        b.iter(|| integrate_reduced(&p, p.delta_1, |t| gaussian_time_amplitude(cfg.sigma, t), &ctrl).unwrap())
    });
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let cfg = RunConfig::from_preset_name("fig6").unwrap();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("fig6 full", |b| b.iter(|| run_sweep(black_box(&cfg)).unwrap()));
    group.finish();
}

criterion_group!(benches, spectra, loading, dynamics, sweep);
criterion_main!(benches);

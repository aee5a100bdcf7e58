use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use grav_core::catalog::{get_metric, sample_event, Params, MINKOWSKI, SCHWARZSCHILD};
use grav_core::conditions::check_all;
use grav_core::geodesic::{integrate_geodesic, integrate_jacobi, GeodesicState, IntegratorOptions};
use grav_core::quasilocal::{komar_energy, KillingData, Normalization, SurfaceSpec};
use grav_core::tensor::{reconstruct_symmetric, standard_sample_set, static_observer};
use grav_core::{BoostGrid, DerivativeScheme, Event, StressEnergyField, Vec4};
use std::hint::black_box;

fn komar(c: &mut Criterion) {
    let chart = get_metric(SCHWARZSCHILD, &Params::new()).unwrap();
    let k = KillingData::time_translation();
    let s = DerivativeScheme::default();
    let mut g = c.benchmark_group("komar_energy");
    for n in [8usize, 32, 128] {
        let surface = SurfaceSpec::sphere(10.0).with_nodes(n, 2 * n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &surface, |b, surface| {
            b.iter(|| komar_energy(&chart, black_box(surface), &k, Normalization::Infinity, &s).unwrap())
        });
    }
    g.finish();
}

fn geodesics(c: &mut Criterion) {
    let chart = get_metric(SCHWARZSCHILD, &Params::new()).unwrap();
    let x = Event::new(0.0, 10.0, std::f64::consts::FRAC_PI_2, 0.0);
    let m = chart.local(&x).unwrap();
    let u = *static_observer(&m).unwrap().u();
    let opts = IntegratorOptions {
        step: 1e-2,
        ..IntegratorOptions::default()
    };
    let start = GeodesicState::new(x, u);
    c.bench_function("geodesic_radial_fall_tau5", |b| {
        b.iter(|| integrate_geodesic(&chart, black_box(&start), 5.0, &opts).unwrap())
    });
    let base = integrate_geodesic(&chart, &start, 5.0, &opts).unwrap();
    c.bench_function("jacobi_radial_fall_tau5", |b| {
        b.iter(|| integrate_jacobi(&chart, &base, Vec4::new(0.0, 1.0, 0.0, 0.0), Vec4::zeros(), &opts.scheme).unwrap())
    });
}

fn algebra(c: &mut Criterion) {
    let chart = get_metric(MINKOWSKI, &Params::new()).unwrap();
    let x = sample_event(MINKOWSKI);
    let m = chart.local(&x).unwrap();
    let obs = static_observer(&m).unwrap();
    let t = StressEnergyField::perfect_fluid(chart.clone(), 1.0, -0.4).at(&x).unwrap();
    let grid = BoostGrid::default();
    c.bench_function("energy_conditions_default_grid", |b| {
        b.iter(|| check_all(black_box(&t), &m, &obs, &grid).unwrap())
    });
    let samples: Vec<_> = standard_sample_set(&obs)
        .into_iter()
        .map(|v| {
            let f = t.quadratic(&v.components);
            (v, f)
        })
        .collect();
    c.bench_function("reconstruct_symmetric", |b| {
        b.iter(|| reconstruct_symmetric(&m, black_box(&samples)).unwrap())
    });
}

criterion_group!(benches, komar, geodesics, algebra);
criterion_main!(benches);

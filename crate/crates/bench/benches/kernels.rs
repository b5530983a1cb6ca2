use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use parasharp_core::estimate::{default_times, verify_estimate};
use parasharp_core::mild::kernel::{spatial_weights, time_kernel};
use parasharp_core::mild::{derivative_field, picard_solve, selfsim_field, PicardConfig};
use parasharp_core::sharpness::{gap_sweep, DEFAULT_WINDOW};
use parasharp_core::specfun::{gauss_hermite, tail_integral_I};
use parasharp_core::{solve_profile, GridSpec, InitialDataSpec, NonlinearitySpec, QuadratureConfig};

fn special_functions(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    c.bench_function("gauss_hermite_64", |b| b.iter(|| gauss_hermite(black_box(64)).unwrap()));
    c.bench_function("tail_integral_I", |b| b.iter(|| tail_integral_I(black_box(1.5), &cfg).unwrap()));
}

fn kernels(c: &mut Criterion) {
    c.bench_function("spatial_weights", |b| b.iter(|| spatial_weights(black_box(0.37))));
    let t_grid = GridSpec::for_horizon(1.0).t_grid();
    c.bench_function("time_kernel", |b| b.iter(|| time_kernel(black_box(1.0), &t_grid, 0.1, 0.0, f64::INFINITY)));
}

fn profiles(c: &mut Criterion) {
    c.bench_function("solve_profile_p0.5", |b| b.iter(|| solve_profile(black_box(0.5), 1e-10, 12.0).unwrap()));
    let cfg = QuadratureConfig::default();
    c.bench_function("gap_sweep_64", |b| b.iter(|| gap_sweep(64, 1.0, DEFAULT_WINDOW, &cfg).unwrap()));
}

fn solver(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let mut group = c.benchmark_group("mild");
    group.sample_size(10);
    let f = NonlinearitySpec::Linear { a: 1.0 };
    let u0 = InitialDataSpec::Sinusoid { amplitude: 1.0, wavenumber: 1.0 };
    let g = GridSpec { t_final: 0.25, x_half: 8.0, dx: 0.2, nt: 16 };
    group.bench_function("picard_small", |b| {
        b.iter(|| picard_solve(&f, &u0, &g, &cfg, &PicardConfig::default()).unwrap())
    });
    let u = picard_solve(&f, &u0, &g, &cfg, &PicardConfig::default()).unwrap().field;
    group.bench_function("verify_small", |b| {
        b.iter(|| verify_estimate(&f, &u0, &u, &default_times(0.25), 0.5, &cfg).unwrap())
    });
    let prof = solve_profile(0.5, 1e-10, 12.0).unwrap();
    let field = selfsim_field(&prof, 1.0, &GridSpec::for_horizon(1.0)).unwrap();
    let power = NonlinearitySpec::PowerLaw { p: 0.5 };
    group.bench_function("derivative_field_selfsim", |b| {
        b.iter(|| derivative_field(&power, &InitialDataSpec::Zero, &field, 1.0, &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, special_functions, kernels, profiles, solver);
criterion_main!(benches);

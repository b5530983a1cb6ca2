use parasharp_core::closed_forms::selfsim_derivative_sup;
use parasharp_core::mild::*;
use parasharp_core::profile::solve_profile;
use parasharp_core::QuadratureConfig;
use proptest::prelude::*;

fn window_max(u: &SpaceTimeField, g: impl Fn(usize, usize) -> f64) -> f64 {
    let w = verification_half_width(u) + 1e-9;
    let mut worst = 0.0f64;
    for k in 0..u.t.len() {
        for (j, &x) in u.x.iter().enumerate() {
            if x.abs() <= w {
                worst = worst.max(g(k, j));
            }
        }
    }
    worst
}

fn sin0() -> InitialDataSpec {
    InitialDataSpec::Sinusoid { amplitude: 1.0, wavenumber: 1.0 }
}

#[test]
fn free_heat_flow_of_a_sine() {
    let cfg = QuadratureConfig::default();
    let g = GridSpec::for_horizon(1.0);
    let r = picard_solve(&NonlinearitySpec::Zero, &sin0(), &g, &cfg, &PicardConfig::default()).unwrap();
    assert!(r.converged);
    let u = &r.field;
    let err = window_max(u, |k, j| (u.values[k][j] - (-u.t[k]).exp() * u.x[j].sin()).abs());
    assert!(err < 1e-6, "{err}");
    for t in [0.25, 1.0] {
        let d = derivative_field(&NonlinearitySpec::Zero, &sin0(), u, t, &cfg).unwrap();
        for (j, &x) in u.x.iter().enumerate() {
            if x.abs() <= verification_half_width(u) {
                assert!((d[j] - (-t).exp() * x.cos()).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn constant_source_gives_linear_growth() {
    let cfg = QuadratureConfig::default();
    let g = GridSpec::for_horizon(1.0);
    let f = NonlinearitySpec::Constant { c: 0.7 };
    let r = picard_solve(&f, &InitialDataSpec::Zero, &g, &cfg, &PicardConfig::default()).unwrap();
    assert!(r.converged);
    let u = &r.field;
    let err = u
        .values
        .iter()
        .zip(&u.t)
        .flat_map(|(row, &t)| row.iter().map(move |&v| (v - 0.7 * t).abs()))
        .fold(0.0, f64::max);
    assert!(err < 1e-8, "{err}");
    assert!(duhamel_residual(&f, &InitialDataSpec::Zero, u, &cfg).unwrap() < 1e-8);
    let d = derivative_field(&f, &InitialDataSpec::Zero, u, 1.0, &cfg).unwrap();
    assert!(d.iter().all(|v| v.abs() < 1e-8));
}

#[test]
fn unit_gain_keeps_the_sine_stationary() {
    let cfg = QuadratureConfig::default();
    let g = GridSpec::for_horizon(1.0);
    let f = NonlinearitySpec::Linear { a: 1.0 };
    let picard = PicardConfig::default();
    let r = picard_solve(&f, &sin0(), &g, &cfg, &picard).unwrap();
    assert!(r.converged);
    assert_eq!(r.seed, SeedKind::Zero);
    let u = &r.field;
    let err = window_max(u, |k, j| (u.values[k][j] - u.x[j].sin()).abs());
    assert!(err < 1e-6, "{err}");
    let res = duhamel_residual(&f, &sin0(), u, &cfg).unwrap();
    assert!(res <= 10.0 * picard.tol, "{res}");
}

#[test]
fn trivial_triple_stays_zero() {
    let cfg = QuadratureConfig::default();
    let g = GridSpec::for_horizon(1.0);
    let r = picard_solve(&NonlinearitySpec::Zero, &InitialDataSpec::Zero, &g, &cfg, &PicardConfig::default()).unwrap();
    assert!(r.field.values.iter().flatten().all(|&v| v == 0.0));
    let d = derivative_field(&NonlinearitySpec::Zero, &InitialDataSpec::Zero, &r.field, 1.0, &cfg).unwrap();
    assert!(d.iter().all(|&v| v == 0.0));
    assert!(duhamel_residual(&NonlinearitySpec::Zero, &InitialDataSpec::Zero, &r.field, &cfg).unwrap() < 1e-12);
}

#[test]
fn power_law_with_zero_data_is_seeded_self_similar() {
    let cfg = QuadratureConfig::default();
    let g = GridSpec::for_horizon(1.0);
    let f = NonlinearitySpec::PowerLaw { p: 0.5 };
    let r = picard_solve(&f, &InitialDataSpec::Zero, &g, &cfg, &PicardConfig::default()).unwrap();
    assert_eq!(r.seed, SeedKind::SelfSimilar);
    // the iterate must not collapse to the zero solution
    let n = r.field.x.len();
    assert!(r.field.values[r.field.t.len() - 1][n - 1] > 0.2);
}

#[test]
fn self_similar_field_is_a_fixed_point() {
    let cfg = QuadratureConfig::default();
    let prof = solve_profile(0.5, 1e-10, 12.0).unwrap();
    let f = NonlinearitySpec::PowerLaw { p: 0.5 };
    let g = GridSpec::for_horizon(1.0);
    let coarse = duhamel_residual(&f, &InitialDataSpec::Zero, &selfsim_field(&prof, 1.0, &g).unwrap(), &cfg).unwrap();
    let fine =
        duhamel_residual(&f, &InitialDataSpec::Zero, &selfsim_field(&prof, 1.0, &g.refined()).unwrap(), &cfg).unwrap();
    assert!(coarse < 1e-3, "{coarse}");
    assert!(fine <= coarse / 2.0, "{coarse} -> {fine}");
}

#[test]
fn self_similar_field_shape() {
    let prof = solve_profile(0.5, 1e-10, 12.0).unwrap();
    let u = selfsim_field(&prof, 1.0, &GridSpec::for_horizon(1.0)).unwrap();
    let n = u.x.len();
    assert!(u.values[0].iter().all(|&v| v == 0.0));
    for row in &u.values {
        for j in 0..n {
            assert_eq!(row[j], -row[n - 1 - j]);
        }
    }
    assert!((u.values[u.t.len() - 1][n - 1] - 0.25).abs() < 1e-12);
}

#[test]
fn self_similar_derivative_follows_the_power_law() {
    let cfg = QuadratureConfig::default();
    let g = GridSpec::for_horizon(1.0);
    for p in [0.5, 0.25] {
        let prof = solve_profile(p, 1e-10, 12.0).unwrap();
        let f = NonlinearitySpec::PowerLaw { p };
        let u = selfsim_field(&prof, 1.0, &g).unwrap();
        for t in [0.25, 0.5, 1.0] {
            let d = derivative_field(&f, &InitialDataSpec::Zero, &u, t, &cfg).unwrap();
            let sup = d.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            let want = selfsim_derivative_sup(p, prof.slope0, t).unwrap();
            assert!(((sup - want) / want).abs() < 1e-3, "p {p} t {t}: {sup} vs {want}");
        }
    }
}

#[test]
fn rejects_bad_times_and_specs() {
    let cfg = QuadratureConfig::default();
    let u = SpaceTimeField::zeros(&GridSpec { t_final: 1.0, x_half: 4.0, dx: 0.5, nt: 4 });
    let z = InitialDataSpec::Zero;
    assert!(derivative_field(&NonlinearitySpec::Zero, &z, &u, 0.0, &cfg).is_err());
    assert!(derivative_field(&NonlinearitySpec::Zero, &z, &u, 2.0, &cfg).is_err());
    assert!(derivative_field(&NonlinearitySpec::PowerLaw { p: 1.5 }, &z, &u, 1.0, &cfg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heat_flow_contracts(a in -3.0f64..3.0, k in 0.1f64..4.0, b in -2.0f64..2.0, t in 0.01f64..3.0, x in -5.0f64..5.0) {
        let cfg = QuadratureConfig::default();
        let v = |y: f64| a * (k * y).sin() + b * (y / (1.0 + y.abs()));
        let sup = a.abs() + b.abs();
        let h = heat_convolve(v, t, x, &cfg).unwrap();
        prop_assert!(h.abs() <= sup * (1.0 + 1e-12));
    }

    #[test]
    fn heat_flow_of_odd_data_vanishes_at_zero(a in 0.1f64..3.0, t in 0.01f64..3.0) {
        let cfg = QuadratureConfig::default();
        let h = heat_convolve(|y| (a * y).tanh(), t, 0.0, &cfg).unwrap();
        prop_assert!(h.abs() < 1e-14);
    }
}

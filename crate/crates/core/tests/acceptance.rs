//! One pass/fail line per acceptance criterion. Run with `--nocapture` to see them.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use parasharp_core::closed_forms::{eta_prime, phi, s0_residual, selfsim_derivative_sup, w0_deriv, w0_eval};
use parasharp_core::closed_forms::{selfsim_functional_closed, SharpnessConstants, TWO_OVER_SQRT_PI};
use parasharp_core::estimate::{default_times, verify_estimate};
use parasharp_core::mild::{duhamel_residual, picard_solve, selfsim_field, verification_half_width, PicardConfig};
use parasharp_core::profile::solve_profile;
use parasharp_core::sharpness::{convergence_report, gap_sweep, theorem_construction, DEFAULT_WINDOW};
use parasharp_core::sharpness::{PROFILE_ETA_MAX, PROFILE_TOL};
use parasharp_core::specfun::{abel_integral, beta_fn, erfc, gamma_fn, tail_integral_I};
use parasharp_core::{GridSpec, InitialDataSpec, NonlinearitySpec, QuadratureConfig, SpaceTimeField};

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn special_functions() -> Outcome {
    let cfg = QuadratureConfig::default();
    for (x, want) in [(0.5, PI.sqrt()), (1.0, 1.0), (2.5, 0.75 * PI.sqrt())] {
        let g = gamma_fn(x).map_err(err)?;
        ensure(rel(g, want) < 1e-11, || format!("gamma({x}) = {g}"))?;
    }
    let i0 = tail_integral_I(0.0, &cfg).map_err(err)?;
    ensure((i0 - PI.sqrt() / 8.0).abs() < 1e-10, || format!("I(0) = {i0}"))?;
    let mut worst = 0.0f64;
    for a in [0, 1, 2, 3] {
        for t in [0.3, 1.0, 2.5] {
            let got = abel_integral(|s| s.powi(a), t, &cfg).map_err(err)?;
            let want = t.powf(a as f64 + 0.5) * beta_fn(a as f64 + 1.0, 0.5).map_err(err)?;
            worst = worst.max(rel(got, want));
        }
    }
    ensure(worst < 1e-8, || format!("abel rel err {worst:e}"))?;
    Ok(format!("I(0) err {:.1e}, abel rel err {worst:.1e}", (i0 - PI.sqrt() / 8.0).abs()))
}

fn limiting_problem() -> Outcome {
    let cfg = QuadratureConfig::default();
    let w = w0_eval(0.0, &cfg).map_err(err)?;
    let d = w0_deriv(0.0, &cfg).map_err(err)?;
    ensure(w.abs() < 1e-10, || format!("w0(0) = {w}"))?;
    ensure((d - TWO_OVER_SQRT_PI).abs() < 1e-10, || format!("w0'(0) = {d}"))?;
    let mut res = 0.0f64;
    for i in 0..=1990 {
        let eta = 0.05 + i as f64 * 0.005;
        res = res.max(s0_residual(eta, &cfg).map_err(err)?.abs());
    }
    ensure(res < 1e-7, || format!("ODE residual {res:e}"))?;
    let far = w0_eval(20.0, &cfg).map_err(err)?;
    ensure((far - 1.0).abs() < 1e-10, || format!("w0(20) = {far}"))?;
    Ok(format!("residual {res:.1e}, |w0'(0) - 2/sqrt(pi)| {:.1e}", (d - TWO_OVER_SQRT_PI).abs()))
}

const P_ALL: [f64; 7] = [0.5, 0.25, 0.125, 0.0625, 0.031_25, 0.015_625, 0.007_812_5];
const P_CHAIN: [f64; 4] = [0.5, 0.125, 0.031_25, 0.007_812_5];

fn profile_brackets() -> Outcome {
    let ep = eta_prime();
    ensure((ep - 0.086_30).abs() < 5e-5, || format!("eta' = {ep}"))?;
    let lb = 1.0 / (8.0 * 2f64.sqrt());
    for p in P_ALL {
        let sol = solve_profile(p, PROFILE_TOL, PROFILE_ETA_MAX).map_err(err)?;
        let c = SharpnessConstants::new(p).map_err(err)?;
        ensure(sol.converged, || format!("p {p} did not converge"))?;
        ensure(c.slope_lower < sol.slope0 && sol.slope0 < c.phi_p, || {
            format!("p {p}: slope0 {} outside ({}, {})", sol.slope0, c.slope_lower, c.phi_p)
        })?;
        let bad = sol.invariant_violations();
        ensure(bad.is_empty(), || format!("p {p}: {bad:?}"))?;
        let ulp = sol.plateau * f64::EPSILON;
        for (i, &eta) in sol.grid.iter().enumerate() {
            let (w, wp) = (sol.w[i], sol.w_prime[i]);
            ensure(w >= lb * eta.min(ep) - 1e-12, || format!("p {p}: lower bound fails at {eta}"))?;
            ensure(i == 0 || wp < TWO_OVER_SQRT_PI * (-eta * eta / 4.0).exp(), || {
                format!("p {p}: derivative decay fails at {eta}")
            })?;
            ensure(sol.plateau - w <= 2.0 * erfc(eta / 2.0) + ulp, || format!("p {p}: plateau decay fails at {eta}"))?;
        }
    }
    Ok(format!("{} exponents bracketed", P_ALL.len()))
}

fn sharpness_limit() -> Outcome {
    let mut prev = (f64::INFINITY, f64::INFINITY);
    let mut gaps = Vec::new();
    for p in P_CHAIN {
        let s = solve_profile(p, PROFILE_TOL, PROFILE_ETA_MAX).map_err(err)?.slope0;
        let f = phi(p).map_err(err)?;
        let d = ((s - TWO_OVER_SQRT_PI).abs(), (f - TWO_OVER_SQRT_PI).abs());
        ensure(d.0 < prev.0 && d.1 < prev.1, || format!("distances to 2/sqrt(pi) grow at p {p}"))?;
        prev = d;
        gaps.push(s - f);
    }
    let rows = gap_sweep(64, 1.0, DEFAULT_WINDOW, &QuadratureConfig::default()).map_err(err)?;
    ensure(rows.iter().all(|r| r.gap < 0.0), || "a sweep gap is not negative".into())?;
    ensure(gaps.iter().all(|&g| g < 0.0), || format!("gaps {gaps:?}"))?;
    let (first, last) = (gaps[0].abs(), gaps[gaps.len() - 1].abs());
    ensure(last < first / 2.0, || format!("|gap| {first} -> {last}"))?;
    Ok(format!("|gap| {first:.4} -> {last:.5}"))
}

fn profile_convergence() -> Outcome {
    let cfg = QuadratureConfig::default();
    let mut prev = (f64::INFINITY, f64::INFINITY);
    let mut trail = Vec::new();
    for p in P_CHAIN {
        let d = convergence_report(p, DEFAULT_WINDOW, &cfg).map_err(err)?;
        ensure(d.0 < prev.0 && d.1 < prev.1, || format!("distance grows at p {p}: {prev:?} -> {d:?}"))?;
        prev = d;
        trail.push(format!("{:.3e}", d.0));
    }
    Ok(format!("sup|w_p - w0| {}", trail.join(" > ")))
}

fn window_err(u: &SpaceTimeField, exact: impl Fn(f64, f64) -> f64) -> f64 {
    let w = verification_half_width(u) + 1e-9;
    let mut worst = 0.0f64;
    for (k, &t) in u.t.iter().enumerate() {
        for (j, &x) in u.x.iter().enumerate() {
            if x.abs() <= w {
                worst = worst.max((u.values[k][j] - exact(t, x)).abs());
            }
        }
    }
    worst
}

fn solve(f: &NonlinearitySpec, u0: &InitialDataSpec) -> Result<SpaceTimeField, String> {
    let cfg = QuadratureConfig::default();
    let r = picard_solve(f, u0, &GridSpec::for_horizon(1.0), &cfg, &PicardConfig::default()).map_err(err)?;
    ensure(r.converged, || format!("{f:?} / {u0:?} did not converge"))?;
    Ok(r.field)
}

fn sine() -> InitialDataSpec {
    InitialDataSpec::Sinusoid { amplitude: 1.0, wavenumber: 1.0 }
}

fn mild_oracles() -> Outcome {
    let heat = window_err(&solve(&NonlinearitySpec::Zero, &sine())?, |t, x| (-t).exp() * x.sin());
    ensure(heat < 1e-6, || format!("heat flow err {heat:e}"))?;
    let c = 0.7;
    let lin = solve(&NonlinearitySpec::Constant { c }, &InitialDataSpec::Zero)?;
    let growth = lin.values.iter().zip(&lin.t).flat_map(|(r, &t)| r.iter().map(move |v| (v - c * t).abs()));
    let growth = growth.fold(0.0, f64::max);
    ensure(growth < 1e-8, || format!("constant source err {growth:e}"))?;
    let still = window_err(&solve(&NonlinearitySpec::Linear { a: 1.0 }, &sine())?, |_, x| x.sin());
    ensure(still < 1e-6, || format!("stationary sine err {still:e}"))?;
    let zero = solve(&NonlinearitySpec::Zero, &InitialDataSpec::Zero)?;
    ensure(zero.values.iter().flatten().all(|&v| v == 0.0), || "trivial triple not zero".into())?;
    Ok(format!("errors {heat:.1e}, {growth:.1e}, {still:.1e}, 0"))
}

fn duhamel_membership() -> Outcome {
    let cfg = QuadratureConfig::default();
    let prof = solve_profile(0.5, PROFILE_TOL, PROFILE_ETA_MAX).map_err(err)?;
    let f = NonlinearitySpec::PowerLaw { p: 0.5 };
    let g = GridSpec::for_horizon(1.0);
    let res = |g: &GridSpec| -> Result<f64, String> {
        let u = selfsim_field(&prof, 1.0, g).map_err(err)?;
        duhamel_residual(&f, &InitialDataSpec::Zero, &u, &cfg).map_err(err)
    };
    let (coarse, fine) = (res(&g)?, res(&g.refined())?);
    ensure(coarse < 1e-3, || format!("residual {coarse:e}"))?;
    ensure(fine <= coarse / 2.0, || format!("residual {coarse:e} -> {fine:e}"))?;
    Ok(format!("residual {coarse:.2e} -> {fine:.2e}"))
}

fn estimate_holds() -> Outcome {
    let cfg = QuadratureConfig::default();
    let times = default_times(1.0);
    let triples = [
        (NonlinearitySpec::Zero, InitialDataSpec::Zero),
        (NonlinearitySpec::Constant { c: 1.0 }, InitialDataSpec::Zero),
        (NonlinearitySpec::Linear { a: 1.0 }, sine()),
    ];
    let mut worst = f64::NEG_INFINITY;
    for (f, u0) in &triples {
        let u = solve(f, u0)?;
        let r = verify_estimate(f, u0, &u, &times, 0.5, &cfg).map_err(err)?;
        ensure(r.trusted && r.violations.is_empty(), || format!("{f:?}: {:?}", r.violations))?;
        ensure(r.gap.iter().all(|&g| g <= r.eps_quad), || format!("{f:?}: gap above eps"))?;
        worst = worst.max(r.gap.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    }
    let (mut lhs_err, mut rhs_err) = (0.0f64, 0.0f64);
    for p in [0.5, 0.25] {
        let prof = solve_profile(p, PROFILE_TOL, PROFILE_ETA_MAX).map_err(err)?;
        let f = NonlinearitySpec::PowerLaw { p };
        let u = selfsim_field(&prof, 1.0, &GridSpec::for_horizon(1.0)).map_err(err)?;
        let r = verify_estimate(&f, &InitialDataSpec::Zero, &u, &times, 0.1, &cfg).map_err(err)?;
        ensure(r.trusted && r.violations.is_empty(), || format!("p {p}: {:?}", r.violations))?;
        ensure(r.gap.iter().all(|&g| g <= r.eps_quad), || format!("p {p}: gap above eps"))?;
        for (k, &t) in r.times.iter().enumerate() {
            lhs_err = lhs_err.max(rel(r.lhs[k], selfsim_derivative_sup(p, prof.slope0, t).map_err(err)?));
            rhs_err = rhs_err.max(rel(r.rhs[k], selfsim_functional_closed(p, t).map_err(err)?));
        }
        worst = worst.max(r.gap.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    }
    ensure(lhs_err < 1e-3, || format!("lhs rel err {lhs_err:e}"))?;
    ensure(rhs_err < 1e-4, || format!("rhs rel err {rhs_err:e}"))?;
    Ok(format!("max gap {worst:.2e}, lhs rel err {lhs_err:.1e}, rhs rel err {rhs_err:.1e}"))
}

fn construction() -> Outcome {
    let cfg = QuadratureConfig::default();
    let c1 = theorem_construction(1.0, 1.0, 1, &cfg).map_err(err)?;
    ensure((c1.c - PI.sqrt()).abs() < 1e-12, || format!("c = {}", c1.c))?;
    for n in [8, 16, 32, 64] {
        let c = theorem_construction(1.0, 1.0, n, &cfg).map_err(err)?;
        ensure(c.alpha_flag, || format!("alpha flag false at n {n}"))?;
    }
    let c32 = theorem_construction(1.0, 1.0, 32, &cfg).map_err(err)?;
    ensure((c32.final_derivative_sup - 2.0).abs() < 0.1, || format!("sup at n 32: {}", c32.final_derivative_sup))?;
    let c64 = theorem_construction(1.0, 1.0, 64, &cfg).map_err(err)?;
    ensure(c64.gap_inf.abs() * 2.0 <= c1.gap_inf.abs(), || format!("gap {} -> {}", c1.gap_inf, c64.gap_inf))?;
    Ok(format!("sup at n 32 {:.4}, gap {:.4} -> {:.5}", c32.final_derivative_sup, c1.gap_inf, c64.gap_inf))
}

fn outputs_with(threads: usize) -> Result<String, String> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(err)?;
    pool.install(|| {
        let cfg = QuadratureConfig::default();
        let rows = gap_sweep(64, 1.0, DEFAULT_WINDOW, &cfg).map_err(err)?;
        let f = NonlinearitySpec::Linear { a: 1.0 };
        let g = GridSpec { t_final: 0.25, x_half: 8.0, dx: 0.2, nt: 16 };
        let u = picard_solve(&f, &sine(), &g, &cfg, &PicardConfig::default()).map_err(err)?.field;
        let report = verify_estimate(&f, &sine(), &u, &default_times(0.25), 0.5, &cfg).map_err(err)?;
        let built = theorem_construction(1.0, 1.0, 8, &cfg).map_err(err)?;
        serde_json::to_string(&(rows, &u, report, built)).map_err(err)
    })
}

fn determinism() -> Outcome {
    let a = outputs_with(1)?;
    let b = outputs_with(4)?;
    let c = outputs_with(4)?;
    ensure(a == b && b == c, || "serialized outputs differ between runs".into())?;
    Ok(format!("{} bytes identical across 3 runs", a.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("special functions", 1, special_functions),
        ("limiting problem", 1, limiting_problem),
        ("profile brackets", 30, profile_brackets),
        ("sharpness limit", 60, sharpness_limit),
        ("profile convergence", 60, profile_convergence),
        ("mild solver oracles", 30, mild_oracles),
        ("duhamel membership", 120, duhamel_membership),
        ("derivative estimate", 120, estimate_holds),
        ("construction", 60, construction),
        ("determinism", 600, determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, budget, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > Duration::from_secs(budget) => Err(format!("{detail}; over the {budget} s budget")),
            other => other,
        };
        let (status, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {:>2} {status} {name} ({:.2} s): {detail}", i + 1, took.as_secs_f64());
        if outcome.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

use crate::error::{Error, Result};
use crate::specfun::gauss::legendre_rule;
use crate::specfun::QuadratureConfig;

const MAX_DEPTH: u32 = 40;

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, order: usize) -> Result<f64> {
    let rule = legendre_rule(order)?;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in rule.iter() {
        let s = mid + half * x;
        let v = f(s);
        if !v.is_finite() {
            return Err(Error::evaluation("integrate", format!("non-finite sample {v} at {s}")));
        }
        acc += w * v;
    }
    Ok(acc * half)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    order: usize,
    abs_tol: f64,
    rel_tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let left = panel(f, a, m, order)?;
    let right = panel(f, m, b, order)?;
    let refined = left + right;
    let tol = abs_tol.max(rel_tol * refined.abs());
    if (refined - whole).abs() <= tol || depth >= MAX_DEPTH || m <= a || m >= b {
        return Ok(refined);
    }
    Ok(adapt(f, a, m, left, order, 0.5 * abs_tol, rel_tol, depth + 1)?
        + adapt(f, m, b, right, order, 0.5 * abs_tol, rel_tol, depth + 1)?)
}

/// Adaptive Gauss–Legendre integral of `f` over [a, b].
///
/// Each panel is compared against the sum over its two halves and bisected
/// until they agree to `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, order: usize, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integrate", format!("limits must be finite, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, order, abs_tol, rel_tol).map(|v| -v);
    }
    let whole = panel(&f, a, b, order)?;
    adapt(&f, a, b, whole, order, abs_tol, rel_tol, 0)
}

/// ∫₀ᵗ g(τ)(t−τ)^{-1/2} dτ, computed as ∫₀^{√t} 2 g(t−σ²) dσ.
pub fn abel_integral<G: Fn(f64) -> f64>(g: G, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    abel_integral_piecewise(g, t, &[], cfg)
}

/// Like [`abel_integral`], with panel breaks at the times where `g` has kinks
/// or jumps. Breakpoints outside (0, t) are ignored.
pub fn abel_integral_piecewise<G: Fn(f64) -> f64>(g: G, t: f64, breaks: &[f64], cfg: &QuadratureConfig) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::domain("abel_integral", format!("t must be positive, got {t}")));
    }
    let root = t.sqrt();
    let mut knots: Vec<f64> = breaks.iter().filter(|&&b| b > 0.0 && b < t).map(|&b| (t - b).sqrt()).collect();
    knots.push(0.0);
    knots.push(root);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let integrand = |s: f64| 2.0 * g((t - s * s).max(0.0));
    let pieces = (knots.len() - 1) as f64;
    let mut total = 0.0;
    for w in knots.windows(2) {
        total += integrate(integrand, w[0], w[1], cfg.abel_nodes, cfg.abs_tol / pieces, cfg.rel_tol)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::beta_fn;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn constant_and_linear() {
        let cfg = QuadratureConfig::default();
        assert_relative_eq!(abel_integral(|_| 1.0, 1.0, &cfg).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(abel_integral(|s| s, 1.0, &cfg).unwrap(), 4.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn fractional_power() {
        let cfg = QuadratureConfig::default();
        let v = abel_integral(|s| s * s, 1.0, &cfg).unwrap();
        assert_relative_eq!(v, 16.0 / 15.0, max_relative = 1e-12);
        let v = abel_integral(|s: f64| s.powf(1.0 / 3.0), 2.0, &cfg).unwrap();
        let exact = 2f64.powf(1.0 / 3.0 + 0.5) * beta_fn(4.0 / 3.0, 0.5).unwrap();
        assert_relative_eq!(v, exact, max_relative = 1e-8);
    }

    #[test]
    fn monomials_match_beta() {
        let cfg = QuadratureConfig::default();
        for a in 0..4 {
            for t in [0.1, 1.0, 3.7, 10.0] {
                let v = abel_integral(|s: f64| s.powi(a), t, &cfg).unwrap();
                let af = a as f64;
                let exact = t.powf(af + 0.5) * beta_fn(af + 1.0, 0.5).unwrap();
                assert_relative_eq!(v, exact, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn step_function_with_break() {
        let cfg = QuadratureConfig::default();
        // g = 1 on [0, 0.5), 0 after: ∫₀^½ (1−τ)^{-1/2} = 2 − 2√0.5
        let g = |s: f64| if s < 0.5 { 1.0 } else { 0.0 };
        let v = abel_integral_piecewise(g, 1.0, &[0.5], &cfg).unwrap();
        assert_relative_eq!(v, 2.0 - 2.0 * 0.5f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let cfg = QuadratureConfig::default();
        assert!(matches!(abel_integral(|_| 1.0, 0.0, &cfg), Err(Error::Domain { .. })));
        assert!(matches!(abel_integral(|_| 1.0, -1.0, &cfg), Err(Error::Domain { .. })));
        assert!(matches!(abel_integral(|_| f64::NAN, 1.0, &cfg), Err(Error::Evaluation { .. })));
    }

    proptest! {
        #[test]
        fn bounded_by_sup(t in 0.01f64..10.0, a in -3.0f64..3.0, b in 0.0f64..5.0, c in 0.1f64..4.0) {
            let cfg = QuadratureConfig::default();
            let g = |s: f64| a * (b * s).sin() + (c * s).cos();
            let sup = a.abs() + 1.0;
            let v = abel_integral(g, t, &cfg).unwrap();
            prop_assert!(v.abs() <= 2.0 * t.sqrt() * sup + cfg.abs_tol);
        }

        #[test]
        fn nonnegative_for_nonnegative(t in 0.01f64..10.0, k in 0.1f64..6.0) {
            let cfg = QuadratureConfig::default();
            let v = abel_integral(|s: f64| (k * s).sin().powi(2), t, &cfg).unwrap();
            prop_assert!(v >= 0.0);
        }
    }
}

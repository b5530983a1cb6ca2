use crate::error::{Error, Result};
use crate::specfun::abel::integrate;
use crate::specfun::QuadratureConfig;

/// e^{η²/4}·I(η), where I(η) = ∫_η^∞ e^{-s²/4}/(2+s²)² ds.
///
/// With s = η + r the integrand becomes e^{-(r² + 2ηr)/4}/(2+(η+r)²)², which
/// stays O(1) for every η, so the scaled value never underflows.
pub fn tail_integral_scaled(eta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::domain("tail_integral_I", format!("eta must be >= 0, got {eta}")));
    }
    let g = |r: f64| {
        let s = eta + r;
        let d = 2.0 + s * s;
        (-(r * r + 2.0 * eta * r) / 4.0).exp() / (d * d)
    };
    // unit panels keep the Gaussian factor well resolved by the fixed rule
    let len = cfg.tail_cutoff;
    let panels = len.ceil().max(1.0) as usize;
    let width = len / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let a = k as f64 * width;
        total += integrate(g, a, a + width, 32, 1e-17, 1e-15)?;
    }
    Ok(total)
}

/// I(η) = ∫_η^∞ e^{-s²/4}/(2+s²)² ds for η ≥ 0.
#[allow(non_snake_case)]
pub fn tail_integral_I(eta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok((-eta * eta / 4.0).exp() * tail_integral_scaled(eta, cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn value_at_zero() {
        let cfg = QuadratureConfig::default();
        assert_abs_diff_eq!(tail_integral_I(0.0, &cfg).unwrap(), PI.sqrt() / 8.0, epsilon = 1e-14);
    }

    #[test]
    fn far_tail_is_tiny_but_positive() {
        let cfg = QuadratureConfig::default();
        let v = tail_integral_I(20.0, &cfg).unwrap();
        assert!(v > 0.0 && v < 1e-40);
    }

    #[test]
    fn monotone_decreasing() {
        let cfg = QuadratureConfig::default();
        let vals: Vec<f64> = (0..=300).map(|k| tail_integral_I(k as f64 * 0.1, &cfg).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn derivative_matches_integrand() {
        let cfg = QuadratureConfig::default();
        let h = 1e-4;
        for eta in [0.2, 0.5, 1.0, 2.0, 3.5, 5.0, 8.0] {
            let fd = (tail_integral_I(eta + h, &cfg).unwrap() - tail_integral_I(eta - h, &cfg).unwrap()) / (2.0 * h);
            let d = 2.0 + eta * eta;
            let exact = -(-eta * eta / 4.0f64).exp() / (d * d);
            assert_abs_diff_eq!(fd, exact, epsilon = 1e-7);
        }
    }

    #[test]
    fn rejects_negative() {
        let cfg = QuadratureConfig::default();
        assert!(matches!(tail_integral_I(-0.1, &cfg), Err(Error::Domain { .. })));
        assert!(tail_integral_I(f64::NAN, &cfg).is_err());
    }
}

//! Exact formulas for the self-similar family and the limiting linear problem.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
#[cfg(test)]
use crate::interp::hermite_deriv;
use crate::interp::hermite_eval;
use crate::specfun::{gamma_fn, ln_gamma, tail_integral_scaled, QuadratureConfig};

/// 2/√π, the limit slope.
pub const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

const ONE_MINUS_ULP: f64 = 1.0 - f64::EPSILON / 2.0;

fn check_p(op: &'static str, p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("p must lie in (0, 1), got {p}")))
    }
}

fn check_eta(op: &'static str, eta: f64) -> Result<()> {
    if eta.is_finite() && eta >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(op, format!("eta must be >= 0, got {eta}")))
    }
}

/// Constants attached to the exponent p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessConstants {
    pub p: f64,
    pub phi_p: f64,
    pub plateau: f64,
    pub slope_lower: f64,
    pub slope_upper: f64,
}

impl SharpnessConstants {
    pub fn new(p: f64) -> Result<Self> {
        Ok(Self {
            p,
            phi_p: phi(p)?,
            plateau: plateau(p)?,
            slope_lower: slope_lower(p)?,
            slope_upper: TWO_OVER_SQRT_PI,
        })
    }

    /// The stronger lower bound with (1−p)^{1/2} in the denominator, kept for logging.
    pub fn slope_lower_alt(&self) -> f64 {
        self.plateau / (1.0 - self.p).sqrt()
    }
}

/// Far-field value (1−p)^{1/(1−p)}.
pub fn plateau(p: f64) -> Result<f64> {
    check_p("plateau", p)?;
    Ok(((1.0 - p).ln() / (1.0 - p)).exp())
}

/// (1−p)^{1/(1−p)}/√(1+p).
pub fn slope_lower(p: f64) -> Result<f64> {
    Ok(plateau(p)? / (1.0 + p).sqrt())
}

/// Time exponent (1+p)/(2(1−p)) of the derivative sup and of F_t.
pub fn selfsim_exponent(p: f64) -> Result<f64> {
    check_p("selfsim_exponent", p)?;
    Ok((1.0 + p) / (2.0 * (1.0 - p)))
}

/// φ(p) = (1−p)^{p/(1−p)} Γ(1/(1−p)) / Γ((3−p)/(2(1−p))); in log space once
/// 1/(1−p) leaves the range where Γ is evaluated directly.
pub fn phi(p: f64) -> Result<f64> {
    check_p("phi", p)?;
    let q = 1.0 - p;
    let (a, b) = (1.0 / q, (3.0 - p) / (2.0 * q));
    if a < 12.0 {
        return Ok(q.powf(p / q) * gamma_fn(a)? / gamma_fn(b)?);
    }
    let log = p / q * q.ln() + ln_gamma(a)? - ln_gamma(b)?;
    Ok(log.exp())
}

/// Right end η′ = √π(√(1 + 1/(4√(2π))) − 1) of the linear lower-bound window.
pub fn eta_prime() -> f64 {
    PI.sqrt() * ((1.0 + 1.0 / (4.0 * (2.0 * PI).sqrt())).sqrt() - 1.0)
}

/// The decaying solution m(η) = (2+η²)I(η) of m″ + ½ηm′ − m = 0 and its derivative.
pub fn decay_mode(eta: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    check_eta("decay_mode", eta)?;
    let j = tail_integral_scaled(eta, cfg)?;
    let g = (-eta * eta / 4.0).exp();
    let d = 2.0 + eta * eta;
    let m = d * g * j;
    // 2ηI − e^{-η²/4}/(2+η²), factored to keep relative accuracy in the tail
    let dm = g * (2.0 * eta * j - 1.0 / d);
    Ok((m, dm))
}

/// w₀(η) = 1 − (4/√π)(2+η²)I(η).
pub fn w0_eval(eta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_eta("w0_eval", eta)?;
    let (m, _) = decay_mode(eta, cfg)?;
    // the exact value lies in [0, 1); keep it so after rounding
    Ok((1.0 - 4.0 / PI.sqrt() * m).clamp(0.0, ONE_MINUS_ULP))
}

/// w₀′(η) = −(4/√π)[2ηI(η) − e^{-η²/4}/(2+η²)].
pub fn w0_deriv(eta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_eta("w0_deriv", eta)?;
    let (_, dm) = decay_mode(eta, cfg)?;
    Ok(-4.0 / PI.sqrt() * dm)
}

/// Analytic second derivative of w₀.
pub fn w0_second_deriv(eta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_eta("w0_second_deriv", eta)?;
    let j = tail_integral_scaled(eta, cfg)?;
    let g = (-eta * eta / 4.0).exp();
    let d = 2.0 + eta * eta;
    // d/dη[e^{-η²/4}/(2+η²)] = −e^{-η²/4}(η/(2(2+η²)) + 2η/(2+η²)²)
    let dq = -(eta / (2.0 * d) + 2.0 * eta / (d * d));
    let inner = 2.0 * j - 2.0 * eta / (d * d) - dq;
    Ok(-4.0 / PI.sqrt() * g * inner)
}

/// w₀″ + ½ηw₀′ − w₀ + 1 from the closed forms.
pub fn s0_residual(eta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::domain("s0_residual", format!("eta must be > 0, got {eta}")));
    }
    let w = w0_eval(eta, cfg)?;
    let wp = w0_deriv(eta, cfg)?;
    let wpp = w0_second_deriv(eta, cfg)?;
    Ok(wpp + 0.5 * eta * wp - w + 1.0)
}

/// F_t on the self-similar triple: φ(p)·t^{(1+p)/(2(1−p))}.
pub fn selfsim_functional_closed(p: f64, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::domain("selfsim_functional_closed", format!("t must be > 0, got {t}")));
    }
    Ok(phi(p)? * t.powf(selfsim_exponent(p)?))
}

/// ‖u_x(·,t)‖ on the self-similar solution: slope0·t^{(1+p)/(2(1−p))}.
pub fn selfsim_derivative_sup(p: f64, slope0: f64, t: f64) -> Result<f64> {
    if !(slope0.is_finite() && slope0 > 0.0) {
        return Err(Error::domain("selfsim_derivative_sup", format!("slope0 must be > 0, got {slope0}")));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::domain("selfsim_derivative_sup", format!("t must be > 0, got {t}")));
    }
    Ok(slope0 * t.powf(selfsim_exponent(p)?))
}

const TABLE_STEP: f64 = 0.005;
const TABLE_END: f64 = 16.0;

struct W0Table {
    eta: Vec<f64>,
    w: Vec<f64>,
    dw: Vec<f64>,
    ddw: Vec<f64>,
}

fn w0_table() -> &'static W0Table {
    static TABLE: OnceLock<W0Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let cfg = QuadratureConfig::default();
        let n = (TABLE_END / TABLE_STEP).round() as usize;
        let eta: Vec<f64> = (0..=n).map(|k| k as f64 * TABLE_STEP).collect();
        let w = eta.iter().map(|&e| w0_eval(e, &cfg).expect("eta >= 0")).collect();
        let dw = eta.iter().map(|&e| w0_deriv(e, &cfg).expect("eta >= 0")).collect();
        let ddw = eta.iter().map(|&e| w0_second_deriv(e, &cfg).expect("eta >= 0")).collect();
        W0Table { eta, w, dw, ddw }
    })
}

/// w₀ extended oddly to the whole line, read from a cached Hermite table
/// (error below 1e-11). Equal to ±1 beyond η = 16.
pub fn w0_odd(eta: f64) -> f64 {
    let a = eta.abs();
    let v = if a >= TABLE_END {
        1.0
    } else {
        let t = w0_table();
        hermite_eval(&t.eta, &t.w, &t.dw, a)
    };
    if eta < 0.0 {
        -v
    } else {
        v
    }
}

/// Derivative of [`w0_odd`] (an even function).
pub fn w0_odd_deriv(eta: f64) -> f64 {
    let a = eta.abs();
    if a >= TABLE_END {
        return 0.0;
    }
    let t = w0_table();
    hermite_eval(&t.eta, &t.dw, &t.ddw, a).max(0.0)
}

/// Slope of the cached derivative interpolant, used only by tests.
#[cfg(test)]
fn w0_table_second(eta: f64) -> f64 {
    let t = w0_table();
    hermite_deriv(&t.eta, &t.dw, &t.ddw, eta)
}

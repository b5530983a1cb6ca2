//! The derivative estimate ‖u_x(·,t)‖ ≤ F_t(f, u₀, u) checked on a field.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::{hermite_eval, pchip_slopes};
use crate::mild::{
    derivative_field, duhamel_residual, verification_half_width, InitialDataSpec, NonlinearitySpec, SpaceTimeField,
};
use crate::specfun::{abel_integral_piecewise, QuadratureConfig};

/// Residual above which a report is marked untrusted.
pub const RESIDUAL_THRESHOLD: f64 = 1e-3;

/// Number of report times used by [`default_times`].
pub const DEFAULT_TIME_COUNT: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub times: Vec<f64>,
    /// ‖u_x(·,t)‖ per time.
    pub lhs: Vec<f64>,
    /// F_t per time.
    pub rhs: Vec<f64>,
    pub gap: Vec<f64>,
    /// ‖u₀′‖ + (2√t/√π)‖f(u)‖ per time.
    pub ebound: Vec<f64>,
    pub inf_gap: f64,
    /// ‖u_x(·,T)‖.
    pub final_lhs: f64,
    pub alpha: f64,
    pub alpha_flag: bool,
    pub residual: f64,
    pub eps_quad: f64,
    pub trusted: bool,
    /// Invariants that failed by more than `eps_quad`.
    pub violations: Vec<String>,
}

/// Geometric times from T/4 to T.
pub fn default_times(t_final: f64) -> Vec<f64> {
    let n = DEFAULT_TIME_COUNT;
    (0..n)
        .map(|i| if i + 1 == n { t_final } else { t_final * 4f64.powf(-((n - 1 - i) as f64) / (n - 1) as f64) })
        .collect()
}

fn check_time(u: &SpaceTimeField, t: f64, op: &'static str) -> Result<()> {
    let tf = u.t_final();
    if !(t.is_finite() && t > 0.0 && t <= tf * (1.0 + 1e-12)) {
        return Err(Error::domain(op, format!("t must lie in (0, {tf}], got {t}")));
    }
    Ok(())
}

/// Per-row sup_x |f(u(x, t_k))|, far field included.
pub fn source_sups(f: &NonlinearitySpec, u: &SpaceTimeField) -> Vec<f64> {
    (0..u.t.len()).map(|k| u.row_sup(k, |v| f.eval(v))).collect()
}

#[allow(non_snake_case)]
/// F_t = ‖u₀′‖ + (1/√π)∫₀ᵗ ‖f(u(·,τ))‖ (t−τ)^{-1/2} dτ, with the inner sup
/// interpolated monotonically between time rows.
pub fn functional_F(
    f: &NonlinearitySpec,
    u0: &InitialDataSpec,
    u: &SpaceTimeField,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    f.validate()?;
    u0.validate()?;
    cfg.validate()?;
    u.validate()?;
    check_time(u, t, "functional_F")?;
    let sups = source_sups(f, u);
    functional_from_sups(u0.deriv_sup(), &u.t, &sups, t.min(u.t_final()), cfg)
}

fn functional_from_sups(v_sup: f64, times: &[f64], sups: &[f64], t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if sups.iter().all(|&s| s == 0.0) {
        return Ok(v_sup);
    }
    let slopes = pchip_slopes(times, sups);
    let g = |tau: f64| hermite_eval(times, sups, &slopes, tau).max(0.0);
    let integral = abel_integral_piecewise(g, t, times, cfg)?;
    Ok(v_sup + integral / PI.sqrt())
}

/// ‖u₀′‖ + (2√t/√π)·sup |f(u)| over the rows up to and including the first
/// row at or after t.
pub fn functional_upper_bound(f: &NonlinearitySpec, u0: &InitialDataSpec, u: &SpaceTimeField, t: f64) -> Result<f64> {
    f.validate()?;
    u0.validate()?;
    u.validate()?;
    check_time(u, t, "functional_upper_bound")?;
    let sups = source_sups(f, u);
    Ok(upper_from_sups(u0.deriv_sup(), &u.t, &sups, t))
}

fn upper_from_sups(v_sup: f64, times: &[f64], sups: &[f64], t: f64) -> f64 {
    let last = times.partition_point(|&s| s < t).min(times.len() - 1);
    let sup = sups[..=last].iter().copied().fold(0.0, f64::max);
    v_sup + 2.0 * t.sqrt() / PI.sqrt() * sup
}

/// sup |u_x(x, t)| over the grid points inside the verification window,
/// where the truncation of the domain cannot reach by time T.
pub fn derivative_sup(
    f: &NonlinearitySpec,
    u0: &InitialDataSpec,
    u: &SpaceTimeField,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_time(u, t, "derivative_sup")?;
    let d = derivative_field(f, u0, u, t.min(u.t_final()), cfg)?;
    let window = verification_half_width(u) + 1e-9 * u.dx();
    Ok(u.x.iter().zip(&d).filter(|(x, _)| x.abs() <= window).fold(0.0, |a, (_, &b)| a.max(b.abs())))
}

/// Compares ‖u_x(·,t)‖ with F_t at each of `times` and records the checks.
pub fn verify_estimate(
    f: &NonlinearitySpec,
    u0: &InitialDataSpec,
    u: &SpaceTimeField,
    times: &[f64],
    alpha: f64,
    cfg: &QuadratureConfig,
) -> Result<EstimateReport> {
    f.validate()?;
    u0.validate()?;
    cfg.validate()?;
    u.validate()?;
    if times.is_empty() {
        return Err(Error::Config("need at least one report time".into()));
    }
    if !alpha.is_finite() {
        return Err(Error::domain("verify_estimate", format!("alpha must be finite, got {alpha}")));
    }
    for &t in times {
        check_time(u, t, "verify_estimate")?;
    }
    let tf = u.t_final();
    let residual = duhamel_residual(f, u0, u, cfg)?;
    let eps_quad = 10.0 * (cfg.abs_tol + residual);
    let sups = source_sups(f, u);
    let v_sup = u0.deriv_sup();

    let lhs = times.par_iter().map(|&t| derivative_sup(f, u0, u, t, cfg)).collect::<Result<Vec<f64>>>()?;
    let rhs = times
        .iter()
        .map(|&t| functional_from_sups(v_sup, &u.t, &sups, t.min(tf), cfg))
        .collect::<Result<Vec<f64>>>()?;
    let ebound: Vec<f64> = times.iter().map(|&t| upper_from_sups(v_sup, &u.t, &sups, t)).collect();
    let gap: Vec<f64> = lhs.iter().zip(&rhs).map(|(l, r)| l - r).collect();
    let inf_gap = gap.iter().copied().fold(f64::INFINITY, f64::min);
    let final_lhs = match times.iter().position(|&t| t >= tf) {
        Some(k) => lhs[k],
        None => derivative_sup(f, u0, u, tf, cfg)?,
    };

    let mut violations = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        if gap[k] > eps_quad {
            violations.push(format!("estimate fails at t = {t}: gap {} > {eps_quad}", gap[k]));
        }
        if rhs[k] > ebound[k] + eps_quad {
            violations.push(format!("F_t exceeds its bound at t = {t}: {} > {}", rhs[k], ebound[k]));
        }
    }
    let floor = -upper_from_sups(v_sup, &u.t, &sups, tf) - eps_quad;
    if inf_gap < floor {
        violations.push(format!("inf gap {inf_gap} below {floor}"));
    }

    Ok(EstimateReport {
        times: times.to_vec(),
        lhs,
        rhs,
        gap,
        ebound,
        inf_gap,
        final_lhs,
        alpha,
        alpha_flag: final_lhs >= alpha,
        residual,
        eps_quad,
        trusted: residual <= RESIDUAL_THRESHOLD,
        violations,
    })
}

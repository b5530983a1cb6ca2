//! The gap w_p′(0) − φ(p) along p = 1/(2n), convergence of w_p to w₀, and
//! the scaled construction that drives ‖u_x(·,T)‖ to α + 1.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_forms::{phi, selfsim_exponent, slope_lower, w0_deriv, w0_eval, TWO_OVER_SQRT_PI};
use crate::error::{Error, Result};
use crate::mild::{selfsim_field, GridSpec};
use crate::profile::{solve_profile, ProfileSolution};
use crate::specfun::QuadratureConfig;

/// Bisection width used for every profile in this module.
pub const PROFILE_TOL: f64 = 1e-10;
/// Profile integration range used for every profile in this module.
pub const PROFILE_ETA_MAX: f64 = 12.0;
/// Default right end of the convergence window [0, X].
pub const DEFAULT_WINDOW: f64 = 6.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub n: usize,
    pub p: f64,
    pub slope0: f64,
    pub phi_p: f64,
    /// slope0 − φ(p).
    pub gap: f64,
    /// gap·T^{(1+p)/(2(1−p))}.
    pub scaled_inf: f64,
    pub w0_dist: f64,
    pub w0_deriv_dist: f64,
    /// Why the row has no numbers, when the profile could not be solved.
    pub failure: Option<String>,
}

impl GapRow {
    /// slope_lower(p) < slope0 < φ(p) < 2/√π.
    pub fn chain_holds(&self) -> bool {
        match slope_lower(self.p) {
            Ok(lo) => lo < self.slope0 && self.slope0 < self.phi_p && self.phi_p < TWO_OVER_SQRT_PI,
            Err(_) => false,
        }
    }
}

fn check_window(x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0 && x <= PROFILE_ETA_MAX) {
        return Err(Error::domain("convergence window", format!("X must lie in (0, {PROFILE_ETA_MAX}], got {x}")));
    }
    Ok(())
}

/// Sup distances of w_p and w_p′ from w₀ and w₀′ over the profile grid in [0, X].
pub fn profile_distances(profile: &ProfileSolution, x: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    check_window(x)?;
    let mut dw = 0.0f64;
    let mut dwp = 0.0f64;
    for (i, &eta) in profile.grid.iter().enumerate() {
        if eta > x + 1e-12 {
            break;
        }
        dw = dw.max((profile.w[i] - w0_eval(eta, cfg)?).abs());
        dwp = dwp.max((profile.w_prime[i] - w0_deriv(eta, cfg)?).abs());
    }
    Ok((dw, dwp))
}

/// (sup |w_p − w₀|, sup |w_p′ − w₀′|) on [0, X].
pub fn convergence_report(p: f64, x: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    if !(p > 0.0 && p <= 0.5) {
        return Err(Error::domain("convergence_report", format!("p must lie in (0, 1/2], got {p}")));
    }
    check_window(x)?;
    let profile = solve_profile(p, PROFILE_TOL, PROFILE_ETA_MAX)?;
    profile_distances(&profile, x, cfg)
}

/// n = 1, 2, 4, ... up to n_max.
pub fn sweep_indices(n_max: usize) -> Vec<usize> {
    std::iter::successors(Some(1usize), |&n| n.checked_mul(2)).take_while(|&n| n <= n_max).collect()
}

fn gap_row(n: usize, t_final: f64, x: f64, cfg: &QuadratureConfig) -> GapRow {
    let p = 1.0 / (2.0 * n as f64);
    let solved = solve_profile(p, PROFILE_TOL, PROFILE_ETA_MAX).and_then(|prof| {
        let phi_p = phi(p)?;
        let (w0_dist, w0_deriv_dist) = profile_distances(&prof, x, cfg)?;
        Ok((prof.slope0, phi_p, w0_dist, w0_deriv_dist))
    });
    match solved {
        Ok((slope0, phi_p, w0_dist, w0_deriv_dist)) => {
            let gap = slope0 - phi_p;
            let expo = selfsim_exponent(p).expect("p in (0, 1/2]");
            GapRow {
                n,
                p,
                slope0,
                phi_p,
                gap,
                scaled_inf: gap * t_final.powf(expo),
                w0_dist,
                w0_deriv_dist,
                failure: None,
            }
        }
        Err(e) => GapRow {
            n,
            p,
            slope0: f64::NAN,
            phi_p: f64::NAN,
            gap: f64::NAN,
            scaled_inf: f64::NAN,
            w0_dist: f64::NAN,
            w0_deriv_dist: f64::NAN,
            failure: Some(e.to_string()),
        },
    }
}

/// One row per p = 1/(2n), n = 1, 2, 4, ... ≤ n_max. A profile that fails
/// to solve gives a row with `failure` set; the sweep goes on.
pub fn gap_sweep(n_max: usize, t_final: f64, x: f64, cfg: &QuadratureConfig) -> Result<Vec<GapRow>> {
    if n_max == 0 {
        return Err(Error::domain("gap_sweep", "n_max must be >= 1"));
    }
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::domain("gap_sweep", format!("T must be > 0, got {t_final}")));
    }
    check_window(x)?;
    cfg.validate()?;
    Ok(sweep_indices(n_max).into_par_iter().map(|n| gap_row(n, t_final, x, cfg)).collect())
}

/// c(α, T) = (√π/(2√T))(α + 1).
pub fn construction_constant(alpha: f64, t_final: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::domain("construction", format!("alpha must be > 0, got {alpha}")));
    }
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::domain("construction", format!("T must be > 0, got {t_final}")));
    }
    Ok(PI.sqrt() / (2.0 * t_final.sqrt()) * (alpha + 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    pub alpha: f64,
    pub t_final: f64,
    pub n: usize,
    pub p: f64,
    pub c: f64,
    pub slope0: f64,
    pub phi_p: f64,
    /// ‖u_x(·,T)‖ = slope0·c^{1/(1−p)}·T^{(1+p)/(2(1−p))}.
    pub final_derivative_sup: f64,
    pub alpha_flag: bool,
    /// inf over t ∈ (0, T] of ‖u_x(·,t)‖ − F_t, attained at t = T.
    pub gap_inf: f64,
    /// max |u(x,t) + u(−x,t)| over the tabulated field.
    pub antisymmetry_defect: f64,
}

/// Scaled self-similar solution of u_t − u_xx = c·f_p(u), p = 1/(2n),
/// with c = c(α, T).
pub fn theorem_construction(alpha: f64, t_final: f64, n: usize, cfg: &QuadratureConfig) -> Result<Construction> {
    if n == 0 {
        return Err(Error::domain("construction", "n must be >= 1"));
    }
    cfg.validate()?;
    let c = construction_constant(alpha, t_final)?;
    let p = 1.0 / (2.0 * n as f64);
    let profile = solve_profile(p, PROFILE_TOL, PROFILE_ETA_MAX)?;
    let phi_p = phi(p)?;
    let scale = c.powf(1.0 / (1.0 - p)) * t_final.powf(selfsim_exponent(p)?);
    let final_derivative_sup = profile.slope0 * scale;

    let field = selfsim_field(&profile, c, &GridSpec::for_horizon(t_final))?;
    let nx = field.x.len();
    let antisymmetry_defect =
        field.values.iter().flat_map(|row| (0..nx).map(move |j| (row[j] + row[nx - 1 - j]).abs())).fold(0.0, f64::max);

    Ok(Construction {
        alpha,
        t_final,
        n,
        p,
        c,
        slope0: profile.slope0,
        phi_p,
        final_derivative_sup,
        alpha_flag: final_derivative_sup >= alpha,
        gap_inf: scale * (profile.slope0 - phi_p),
        antisymmetry_defect,
    })
}

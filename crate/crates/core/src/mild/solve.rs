use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{selfsim_field, GridSpec, SpaceTimeField};
use super::kernel::{apply, required_pad, time_kernel, TimeKernel};
use super::spec::{InitialDataSpec, NonlinearitySpec};
use crate::error::{Error, Result};
use crate::interp::spline_coefficients;
use crate::profile::solve_profile;
use crate::specfun::{hermite_rule, QuadratureConfig};

/// (1/√π)∫ v(x + 2√t w) e^{-w²} dw by Gauss–Hermite quadrature.
pub fn heat_convolve(v: impl Fn(f64) -> f64, t: f64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::domain("heat_convolve", format!("t must be > 0, got {t}")));
    }
    let rule = hermite_rule(cfg.gauss_hermite_order)?;
    let s = 2.0 * t.sqrt();
    let mut acc = 0.0;
    for (w, wt) in rule.iter() {
        let y = v(x + s * w);
        if !y.is_finite() {
            return Err(Error::evaluation("heat_convolve", format!("non-finite sample at {}", x + s * w)));
        }
        acc += wt * y;
    }
    Ok(acc / PI.sqrt())
}

/// Starting iterate for the fixed-point iteration.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Seed {
    /// Self-similar field for power laws with zero data, zero otherwise.
    #[default]
    Auto,
    Zero,
    Field(SpaceTimeField),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardConfig {
    pub max_iter: usize,
    /// Sup-norm change between sweeps that ends the iteration.
    pub tol: f64,
    pub seed: Seed,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self { max_iter: 40, tol: 1e-8, seed: Seed::Auto }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedKind {
    Zero,
    SelfSimilar,
    Supplied,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardResult {
    pub field: SpaceTimeField,
    pub iterations: usize,
    pub last_change: f64,
    pub converged: bool,
    pub seed: SeedKind,
}

fn check_inputs(f: &NonlinearitySpec, u0: &InitialDataSpec, cfg: &QuadratureConfig) -> Result<()> {
    f.validate()?;
    u0.validate()?;
    cfg.validate()
}

fn heat_rows(
    u0: &InitialDataSpec,
    x: &[f64],
    t: &[f64],
    cfg: &QuadratureConfig,
    derivative: bool,
) -> Result<Vec<Vec<f64>>> {
    t.par_iter()
        .map(|&tk| {
            x.iter()
                .map(|&xj| {
                    if tk == 0.0 {
                        Ok(if derivative { u0.deriv(xj) } else { u0.eval(xj) })
                    } else if derivative {
                        heat_convolve(|y| u0.deriv(y), tk, xj, cfg)
                    } else {
                        heat_convolve(|y| u0.eval(y), tk, xj, cfg)
                    }
                })
                .collect()
        })
        .collect()
}

fn source_coefficients(f: &NonlinearitySpec, u: &SpaceTimeField, pad: usize) -> Vec<Vec<f64>> {
    u.values
        .par_iter()
        .map(|row| {
            let fr: Vec<f64> = row.iter().map(|&v| f.eval(v)).collect();
            spline_coefficients(&fr, pad)
        })
        .collect()
}

/// Half-width of the window on which residuals are measured: the part of
/// the domain that the truncation at ±X cannot reach within time T.
pub fn verification_half_width(u: &SpaceTimeField) -> f64 {
    let x = u.x_half();
    (x - 8.0 * u.t_final().sqrt()).max(0.25 * x)
}

/// Bounded mild solution by fixed-point iteration of the Duhamel formula.
pub fn picard_solve(
    f: &NonlinearitySpec,
    u0: &InitialDataSpec,
    grids: &GridSpec,
    cfg: &QuadratureConfig,
    picard: &PicardConfig,
) -> Result<PicardResult> {
    check_inputs(f, u0, cfg)?;
    grids.validate()?;
    if picard.max_iter == 0 || !(picard.tol.is_finite() && picard.tol > 0.0) {
        return Err(Error::Config("Picard iteration needs max_iter >= 1 and tol > 0".into()));
    }
    let (mut u, seed) = match (&picard.seed, f.power_law(), u0) {
        (Seed::Field(s), _, _) => {
            s.validate()?;
            if s.x != grids.x_grid() || s.t != grids.t_grid() {
                return Err(Error::Config("seed field does not match the grids".into()));
            }
            (s.clone(), SeedKind::Supplied)
        }
        (Seed::Auto, Some((c, p)), InitialDataSpec::Zero) => {
            let prof = solve_profile(p, 1e-11, 12.0)?;
            (selfsim_field(&prof, c, grids)?, SeedKind::SelfSimilar)
        }
        _ => (SpaceTimeField::zeros(grids), SeedKind::Zero),
    };
    let h = u.dx();
    let pad = required_pad(grids.t_final.sqrt(), h);
    let heat = heat_rows(u0, &u.x, &u.t, cfg, false)?;
    u.values[0] = heat[0].clone();
    let kernels: Vec<TimeKernel> = u.t[1..].par_iter().map(|&t| time_kernel(t, &u.t, h, 0.0, f64::INFINITY)).collect();
    let nx = u.x.len();
    let mut last_change = f64::INFINITY;
    let mut iterations = 0;
    while iterations < picard.max_iter {
        let coeffs = source_coefficients(f, &u, pad);
        let rows: Vec<Vec<f64>> = kernels
            .par_iter()
            .enumerate()
            .map(|(i, k)| {
                let d = apply(k, &coeffs, pad, 1, nx, false);
                heat[i + 1].iter().zip(d).map(|(a, b)| a + b).collect()
            })
            .collect();
        let mut change = 0.0f64;
        for (n, row) in rows.into_iter().enumerate() {
            for (old, new) in u.values[n + 1].iter_mut().zip(row) {
                change = change.max((new - *old).abs());
                *old = new;
            }
        }
        iterations += 1;
        if u.values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Solver(format!("fixed-point iterate is not finite after {iterations} sweeps")));
        }
        last_change = change;
        if change < picard.tol {
            break;
        }
    }
    Ok(PicardResult { field: u, iterations, converged: last_change < picard.tol, last_change, seed })
}

fn check_field_time(u: &SpaceTimeField, t: f64, op: &'static str) -> Result<()> {
    let tf = u.t_final();
    if !(t.is_finite() && t > 0.0 && t <= tf * (1.0 + 1e-12)) {
        return Err(Error::domain(op, format!("t must lie in (0, {tf}], got {t}")));
    }
    Ok(())
}

/// Resolution of the source near the diagonal τ → t in [`derivative_field`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalRefinement {
    /// Below σ = cells·dx the source is resampled on the finer grid.
    pub cells: f64,
    /// Subdivisions of each cell.
    pub factor: usize,
}

impl Default for DiagonalRefinement {
    fn default() -> Self {
        Self { cells: 8.0, factor: 128 }
    }
}

/// Spline coefficients of f(u) sampled `factor` times per cell, with u
/// taken from its own cubic spline. Only rows listed in `rows` are filled.
fn fine_source_coefficients(
    f: &NonlinearitySpec,
    u: &SpaceTimeField,
    rows: &[usize],
    factor: usize,
    fine_pad: usize,
) -> Vec<Vec<f64>> {
    let nx = u.x.len();
    let coarse_pad = fine_pad / factor + 4;
    let mut out = vec![Vec::new(); u.t.len()];
    let filled: Vec<(usize, Vec<f64>)> = rows
        .par_iter()
        .map(|&m| {
            let cu = spline_coefficients(&u.values[m], coarse_pad);
            let n_fine = (nx - 1) * factor + 1;
            let samples: Vec<f64> = (0..n_fine)
                .map(|k| {
                    // position in coarse cells relative to x[0]
                    let y = k as f64 / factor as f64;
                    let i = y.floor() as i64;
                    let mut v = 0.0;
                    for q in i - 1..=i + 2 {
                        let idx = (q + coarse_pad as i64) as usize;
                        v += cu[idx] * crate::interp::bspline3(y - q as f64);
                    }
                    f.eval(v)
                })
                .collect();
            (m, spline_coefficients(&samples, fine_pad))
        })
        .collect();
    for (m, c) in filled {
        out[m] = c;
    }
    out
}

/// u_x(·, t) on the field's x grid from the differentiated Duhamel formula.
pub fn derivative_field(
    f: &NonlinearitySpec,
    u0: &InitialDataSpec,
    u: &SpaceTimeField,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    derivative_field_with(f, u0, u, t, cfg, &DiagonalRefinement::default())
}

pub fn derivative_field_with(
    f: &NonlinearitySpec,
    u0: &InitialDataSpec,
    u: &SpaceTimeField,
    t: f64,
    cfg: &QuadratureConfig,
    refine: &DiagonalRefinement,
) -> Result<Vec<f64>> {
    check_inputs(f, u0, cfg)?;
    u.validate()?;
    check_field_time(u, t, "derivative_field")?;
    if refine.factor == 0 || refine.cells.is_nan() || refine.cells < 0.0 {
        return Err(Error::Config("diagonal refinement needs factor >= 1 and cells >= 0".into()));
    }
    let t = t.min(u.t_final());
    let h = u.dx();
    let nx = u.x.len();
    let cut = (refine.cells * h).min(t.sqrt());
    let pad = required_pad(u.t_final().sqrt(), h);
    let coeffs = source_coefficients(f, u, pad);
    let far = time_kernel(t, &u.t, h, cut, f64::INFINITY);
    let mut d = apply(&far, &coeffs, pad, 1, nx, true);
    if cut > 0.0 {
        let hf = h / refine.factor as f64;
        let near = time_kernel(t, &u.t, hf, 0.0, cut);
        let rows: Vec<usize> = near.active_rows().collect();
        let fine_pad = required_pad(cut, hf);
        let fine = fine_source_coefficients(f, u, &rows, refine.factor, fine_pad);
        let dn = apply(&near, &fine, fine_pad, refine.factor, nx, true);
        for (a, b) in d.iter_mut().zip(dn) {
            *a += b;
        }
    }
    u.x.par_iter().zip(d).map(|(&x, di)| Ok(heat_convolve(|y| u0.deriv(y), t, x, cfg)? + di)).collect()
}

/// u(·, t) from the Duhamel formula applied to the field itself.
pub fn duhamel_value(
    f: &NonlinearitySpec,
    u0: &InitialDataSpec,
    u: &SpaceTimeField,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Vec<f64>> {
    check_inputs(f, u0, cfg)?;
    u.validate()?;
    check_field_time(u, t, "duhamel_value")?;
    let h = u.dx();
    let pad = required_pad(u.t_final().sqrt(), h);
    let coeffs = source_coefficients(f, u, pad);
    let kernel = time_kernel(t.min(u.t_final()), &u.t, h, 0.0, f64::INFINITY);
    let d = apply(&kernel, &coeffs, pad, 1, u.x.len(), false);
    u.x.iter().zip(d).map(|(&x, di)| Ok(heat_convolve(|y| u0.eval(y), t, x, cfg)? + di)).collect()
}

/// Largest defect |Φ(u) − u| of the Duhamel map over rows t > 0 and the
/// interior window |x| ≤ [`verification_half_width`].
pub fn duhamel_residual(
    f: &NonlinearitySpec,
    u0: &InitialDataSpec,
    u: &SpaceTimeField,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_inputs(f, u0, cfg)?;
    u.validate()?;
    let h = u.dx();
    let pad = required_pad(u.t_final().sqrt(), h);
    let coeffs = source_coefficients(f, u, pad);
    let window = verification_half_width(u) + 1e-9 * h;
    let inside: Vec<usize> = (0..u.x.len()).filter(|&j| u.x[j].abs() <= window).collect();
    let nx = u.x.len();
    let worst = (1..u.t.len())
        .into_par_iter()
        .map(|n| -> Result<f64> {
            let t = u.t[n];
            let kernel = time_kernel(t, &u.t, h, 0.0, f64::INFINITY);
            let d = apply(&kernel, &coeffs, pad, 1, nx, false);
            let mut worst = 0.0f64;
            for &j in &inside {
                let heat = heat_convolve(|y| u0.eval(y), t, u.x[j], cfg)?;
                worst = worst.max((heat + d[j] - u.values[n][j]).abs());
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    let row0 = inside.iter().map(|&j| (u0.eval(u.x[j]) - u.values[0][j]).abs()).fold(0.0, f64::max);
    Ok(worst.into_iter().fold(row0, f64::max))
}

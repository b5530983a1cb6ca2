//! Product-integration weights for the Duhamel terms.
//!
//! f(u(·, τ)) is represented between rows by a cubic B-spline in x and
//! linearly in τ. With τ = t − σ² and s = 2σ, row m contributes
//! Σ_d K_m[d]·c_m[j + d] at node x_j, where c_m are the spline coefficients.

use std::f64::consts::PI;

use crate::interp::bspline3;
use crate::specfun::legendre_rule;

/// Gaussian truncation |v| ≤ V_CUT in the spatial averages.
const V_CUT: f64 = 7.0;
/// Beyond this h/s the Gaussian is narrower than a cell and a two-term
/// expansion about the nodes is used.
const RHO_ASYMPTOTIC: f64 = 40.0;
const NODES: usize = 6;

/// Weights (1/√π)∫B3(v/ρ − d)e^{-v²}dv and (1/√π)∫B3(v/ρ − d)v e^{-v²}dv for
/// d = −dmax..=dmax, where ρ = h/s.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialWeights {
    pub dmax: usize,
    pub w0: Vec<f64>,
    pub w1: Vec<f64>,
}

pub fn spatial_weights(rho: f64) -> SpatialWeights {
    if rho > RHO_ASYMPTOTIC {
        // Taylor expansion about the knot at −d; the jumps of the third
        // derivative there give the odd powers of 1/ρ
        let sp = PI.sqrt();
        let (r2, r3) = (rho * rho, rho * rho * rho);
        let val = [0.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 0.0];
        let second = [0.0, 1.0, -2.0, 1.0, 0.0];
        let jump = [1.0, -4.0, 6.0, -4.0, 1.0];
        let slope = [0.0, -0.5, 0.0, 0.5, 0.0];
        let third_sum = [-1.0, 2.0, 0.0, -2.0, 1.0];
        return SpatialWeights {
            dmax: 2,
            w0: (0..5).map(|i| val[i] + second[i] / (4.0 * r2) + jump[i] / (12.0 * sp * r3)).collect(),
            w1: (0..5).map(|i| slope[i] / (2.0 * rho) + third_sum[i] / (16.0 * r3)).collect(),
        };
    }
    spatial_weights_quadrature(rho)
}

fn spatial_weights_quadrature(rho: f64) -> SpatialWeights {
    let rule = legendre_rule(NODES).expect("fixed order");
    // sub-pieces no wider than 0.3 in v
    let m = (rho / 0.3).ceil().max(1.0) as usize;
    // nodes and weights on [0, 1], m sub-pieces of NODES points each
    let mut u = Vec::with_capacity(m * NODES);
    let mut wu = Vec::with_capacity(m * NODES);
    for piece in 0..m {
        for (x, w) in rule.iter() {
            u.push((piece as f64 + 0.5 * (x + 1.0)) / m as f64);
            wu.push(0.5 * w / m as f64);
        }
    }
    let q = u.len();
    // B3 on its four unit pieces [k, k+1], k = −2..=1, times the node weight
    let mut basis = vec![0.0; 4 * q];
    for k in 0..4 {
        for i in 0..q {
            basis[k * q + i] = wu[i] * bspline3(k as f64 - 2.0 + u[i]);
        }
    }
    let dmax = (V_CUT / rho).ceil() as usize + 2;
    // Gaussian at z = i + u for i = −dmax−2 ..= dmax+1
    let lo = -(dmax as i64) - 2;
    let rows = 2 * dmax + 4;
    let mut g = vec![0.0; rows * q];
    let mut gz = vec![0.0; rows * q];
    for r in 0..rows {
        let i = lo + r as i64;
        for n in 0..q {
            let z = rho * (i as f64 + u[n]);
            let e = (-z * z).exp();
            g[r * q + n] = e;
            gz[r * q + n] = e * z;
        }
    }
    let scale = rho / PI.sqrt();
    let width = 2 * dmax + 1;
    let mut w0 = vec![0.0; width];
    let mut w1 = vec![0.0; width];
    for (idx, d) in (-(dmax as i64)..=dmax as i64).enumerate() {
        let mut a0 = 0.0;
        let mut a1 = 0.0;
        for k in 0..4 {
            // z = (k − 2 + u) + d lies in row (k − 2 + d) − lo
            let r = (k as i64 - 2 + d - lo) as usize;
            let b = &basis[k * q..(k + 1) * q];
            let e0 = &g[r * q..(r + 1) * q];
            let e1 = &gz[r * q..(r + 1) * q];
            for n in 0..q {
                a0 += b[n] * e0[n];
                a1 += b[n] * e1[n];
            }
        }
        w0[idx] = scale * a0;
        w1[idx] = scale * a1;
    }
    SpatialWeights { dmax, w0, w1 }
}

/// Accumulated weights of one time row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RowKernel {
    pub dmax: usize,
    /// Value weights, already multiplied by the time measure.
    pub k0: Vec<f64>,
    /// Derivative weights, likewise.
    pub k1: Vec<f64>,
}

impl RowKernel {
    fn add(&mut self, sw: &SpatialWeights, c0: f64, c1: f64) {
        if sw.dmax > self.dmax {
            let grow = sw.dmax - self.dmax;
            let mut k0 = vec![0.0; 2 * sw.dmax + 1];
            let mut k1 = vec![0.0; 2 * sw.dmax + 1];
            let n = self.k0.len();
            k0[grow..grow + n].copy_from_slice(&self.k0);
            k1[grow..grow + n].copy_from_slice(&self.k1);
            self.k0 = k0;
            self.k1 = k1;
            self.dmax = sw.dmax;
        }
        let off = self.dmax - sw.dmax;
        for i in 0..sw.w0.len() {
            self.k0[off + i] += c0 * sw.w0[i];
            self.k1[off + i] += c1 * sw.w1[i];
        }
    }

    /// Drops negligible outer weights.
    fn trim(&mut self, eps: f64) {
        let n = self.k0.len();
        if n == 0 {
            return;
        }
        let mut cut = 0;
        while cut < self.dmax
            && self.k0[cut].abs() <= eps
            && self.k1[cut].abs() <= eps
            && self.k0[n - 1 - cut].abs() <= eps
            && self.k1[n - 1 - cut].abs() <= eps
        {
            cut += 1;
        }
        if cut > 0 {
            self.k0 = self.k0[cut..n - cut].to_vec();
            self.k1 = self.k1[cut..n - cut].to_vec();
            self.dmax -= cut;
        }
    }
}

/// Weights for the Duhamel value and derivative at time t, one entry per
/// stored row m with t_m < t plus the row above the last full panel.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeKernel {
    pub t: f64,
    pub rows: Vec<RowKernel>,
}

/// Splits [a, b] into pieces no wider than max(σ/8, h/16) at their left end.
fn sigma_pieces(a: f64, b: f64, h: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut lo = a;
    while lo < b {
        let step = (lo / 8.0).max(h / 16.0);
        let mut hi = lo + step;
        if hi > b || b - hi < 0.25 * step {
            hi = b;
        }
        out.push((lo, hi));
        lo = hi;
    }
    out
}

/// Builds the kernel for target time t over the time rows `t_grid`
/// (t_grid[0] = 0) and spatial step h, restricted to σ = √(t − τ) in
/// [sigma_lo, sigma_hi].
pub fn time_kernel(t: f64, t_grid: &[f64], h: f64, sigma_lo: f64, sigma_hi: f64) -> TimeKernel {
    let rule = legendre_rule(NODES).expect("fixed order");
    let top = t_grid.partition_point(|&s| s < t).max(1);
    let n_rows = (top + 1).min(t_grid.len());
    let mut rows = vec![RowKernel::default(); n_rows];
    for m in 0..top {
        let t_lo = t_grid[m];
        let t_hi = t_grid[m + 1];
        let span = t_hi - t_lo;
        let sig_a = (t - t_hi.min(t)).max(0.0).sqrt().max(sigma_lo);
        let sig_b = (t - t_lo).sqrt().min(sigma_hi);
        if sig_a >= sig_b {
            continue;
        }
        for (a, b) in sigma_pieces(sig_a, sig_b, h) {
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            for (x, w) in rule.iter() {
                let sigma = mid + half * x;
                let tau = t - sigma * sigma;
                let lam = ((tau - t_lo) / span).clamp(0.0, 1.0);
                let weight = w * half;
                let sw = spatial_weights(h / (2.0 * sigma));
                // value term: 2σ S₀ dσ; derivative term: 2 S₁ dσ
                let v = 2.0 * sigma * weight;
                let d = 2.0 * weight;
                rows[m].add(&sw, v * (1.0 - lam), d * (1.0 - lam));
                if lam > 0.0 {
                    rows[m + 1].add(&sw, v * lam, d * lam);
                }
            }
        }
    }
    for r in &mut rows {
        r.trim(1e-300);
    }
    TimeKernel { t, rows }
}

/// Σ_m Σ_d K_m[d] c_m[pad + j·stride + d] for every output node j.
///
/// Rows of `coeffs` that the kernel does not touch may be empty.
pub fn apply(
    kernel: &TimeKernel,
    coeffs: &[Vec<f64>],
    pad: usize,
    stride: usize,
    nx: usize,
    derivative: bool,
) -> Vec<f64> {
    let mut out = vec![0.0; nx];
    for (m, row) in kernel.rows.iter().enumerate() {
        if row.k0.is_empty() {
            continue;
        }
        let k = if derivative { &row.k1 } else { &row.k0 };
        let c = &coeffs[m];
        let base = pad - row.dmax;
        for (j, o) in out.iter_mut().enumerate() {
            let start = base + j * stride;
            let seg = &c[start..start + k.len()];
            let mut acc = 0.0;
            for (a, b) in k.iter().zip(seg) {
                acc += a * b;
            }
            *o += acc;
        }
    }
    out
}

impl TimeKernel {
    /// Rows with at least one weight.
    pub fn active_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().enumerate().filter(|(_, r)| !r.k0.is_empty()).map(|(m, _)| m)
    }
}

/// Padding that keeps every kernel offset inside the coefficient rows when
/// σ ≤ sigma_max.
pub fn required_pad(sigma_max: f64, h: f64) -> usize {
    (V_CUT * 2.0 * sigma_max / h).ceil() as usize + 2 + 24
}

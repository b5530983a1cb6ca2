//! Piecewise cubic interpolation on ascending grids.

fn locate(x: &[f64], t: f64) -> usize {
    let n = x.len();
    if t <= x[0] {
        return 0;
    }
    if t >= x[n - 1] {
        return n - 2;
    }
    x.partition_point(|&v| v <= t).saturating_sub(1).min(n - 2)
}

fn basis(x: &[f64], t: f64) -> (usize, f64, f64) {
    let i = locate(x, t);
    let h = x[i + 1] - x[i];
    (i, h, (t - x[i]) / h)
}

/// Cubic Hermite interpolant through (x, y) with slopes d.
pub fn hermite_eval(x: &[f64], y: &[f64], d: &[f64], t: f64) -> f64 {
    if x.len() == 1 {
        return y[0];
    }
    let (i, h, s) = basis(x, t);
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y[i] + h10 * h * d[i] + h01 * y[i + 1] + h11 * h * d[i + 1]
}

/// Derivative of [`hermite_eval`].
pub fn hermite_deriv(x: &[f64], y: &[f64], d: &[f64], t: f64) -> f64 {
    if x.len() == 1 {
        return d[0];
    }
    let (i, h, s) = basis(x, t);
    let s2 = s * s;
    let g00 = (6.0 * s2 - 6.0 * s) / h;
    let g10 = 3.0 * s2 - 4.0 * s + 1.0;
    let g01 = (-6.0 * s2 + 6.0 * s) / h;
    let g11 = 3.0 * s2 - 2.0 * s;
    g00 * y[i] + g10 * d[i] + g01 * y[i + 1] + g11 * d[i + 1]
}

/// Monotone (Fritsch–Carlson) slopes for a cubic Hermite interpolant.
pub fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let del: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return vec![del[0]; 2];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if del[k - 1] * del[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
        }
    }
    d[0] = end_slope(h[0], h[1], del[0], del[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    d
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Centered cubic B-spline on [-2, 2].
pub fn bspline3(y: f64) -> f64 {
    let a = y.abs();
    if a >= 2.0 {
        0.0
    } else if a >= 1.0 {
        let r = 2.0 - a;
        r * r * r / 6.0
    } else {
        2.0 / 3.0 - a * a + 0.5 * a * a * a
    }
}

/// Coefficients of the cubic B-spline interpolant of `values` on a uniform
/// grid, extended by `pad` nodes on each side that repeat the edge values.
///
/// Entry `k` of the result belongs to node `k - pad`. The padded ends are
/// pinned to the edge values, which is exact for constant continuation.
pub fn spline_coefficients(values: &[f64], pad: usize) -> Vec<f64> {
    let n = values.len();
    let len = n + 2 * pad;
    let first = values[0];
    let last = values[n - 1];
    let data = |k: usize| {
        if k < pad {
            first
        } else if k >= pad + n {
            last
        } else {
            values[k - pad]
        }
    };
    if len <= 2 {
        return (0..len).map(data).collect();
    }
    // rows: c[k-1]/6 + 2c[k]/3 + c[k+1]/6 = data(k), with c = data at both ends
    let mut c = vec![0.0; len];
    let mut diag = vec![0.0; len];
    let mut rhs = vec![0.0; len];
    c[0] = first;
    c[len - 1] = last;
    let off = 1.0 / 6.0;
    diag[1] = 2.0 / 3.0;
    rhs[1] = data(1) - off * c[0];
    for k in 2..len - 1 {
        let m = off / diag[k - 1];
        diag[k] = 2.0 / 3.0 - m * off;
        rhs[k] = data(k) - m * rhs[k - 1];
    }
    rhs[len - 2] -= off * c[len - 1];
    c[len - 2] = rhs[len - 2] / diag[len - 2];
    for k in (1..len - 2).rev() {
        c[k] = (rhs[k] - off * c[k + 1]) / diag[k];
    }
    c
}

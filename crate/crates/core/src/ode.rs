//! Dormand–Prince 5(4) integrator with steps clipped onto an output grid.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub first_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            first_step: 1e-6,
            max_step: f64::INFINITY,
            min_step: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

/// Returned by the step observer to continue or halt the integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// One Dormand–Prince step. Returns the fifth-order solution and the
/// embedded error estimate.
pub fn dopri_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> ([f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = f(t + C[s] * h, &ys);
    }
    let mut y5 = *y;
    let mut err = [0.0; N];
    for s in 0..7 {
        for i in 0..N {
            y5[i] += h * B5[s] * k[s][i];
            err[i] += h * (B5[s] - B4[s]) * k[s][i];
        }
    }
    (y5, err)
}

/// Integrates y' = f(t, y) from `grid[0]` across an ascending grid.
///
/// States are recorded at each grid point reached. `observe` sees every
/// accepted step and may stop the run early; the recorded prefix is returned
/// together with the time of the last accepted step.
pub fn integrate_on_grid<const N: usize, F, O>(
    f: F,
    y0: [f64; N],
    grid: &[f64],
    ctl: &StepControl,
    mut observe: O,
) -> Result<(Vec<[f64; N]>, f64, [f64; N])>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]) -> Flow,
{
    if grid.is_empty() {
        return Err(Error::Config("integration grid is empty".into()));
    }
    let mut out = Vec::with_capacity(grid.len());
    out.push(y0);
    let mut t = grid[0];
    let mut y = y0;
    let mut h = ctl.first_step;
    let mut steps = 0usize;
    let mut next = 1;
    while next < grid.len() {
        let target = grid[next];
        let mut h_try = h.min(ctl.max_step);
        let clipped = t + h_try >= target;
        if clipped {
            h_try = target - t;
        }
        if h_try < ctl.min_step && !clipped {
            return Err(Error::Integration { eta: t, detail: format!("step size underflow ({h_try:e})") });
        }
        steps += 1;
        if steps > ctl.max_steps {
            return Err(Error::Integration { eta: t, detail: "step budget exhausted".into() });
        }
        let (y_new, err) = dopri_step(&f, t, &y, h_try);
        let mut norm = 0.0f64;
        for i in 0..N {
            let sc = ctl.abs_tol + ctl.rel_tol * y[i].abs().max(y_new[i].abs());
            norm = norm.max((err[i] / sc).abs());
        }
        if !norm.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            h = 0.25 * h_try;
            if h < ctl.min_step {
                return Err(Error::Integration { eta: t, detail: "non-finite state".into() });
            }
            continue;
        }
        let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
        if norm <= 1.0 {
            t = if clipped { target } else { t + h_try };
            y = y_new;
            if clipped {
                out.push(y);
                next += 1;
                // a clipped step says nothing about the natural step size
                h = h.max(h_try * factor);
            } else {
                h = h_try * factor;
            }
            if observe(t, &y) == Flow::Stop {
                break;
            }
        } else {
            h = h_try * factor.min(1.0);
            if h < ctl.min_step {
                return Err(Error::Integration { eta: t, detail: format!("step size underflow ({h:e})") });
            }
        }
    }
    Ok((out, t, y))
}

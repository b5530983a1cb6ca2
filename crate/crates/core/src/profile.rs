//! Self-similar profiles by shooting on the initial slope.

use serde::{Deserialize, Serialize};

use crate::closed_forms::{decay_mode, SharpnessConstants, TWO_OVER_SQRT_PI};
use crate::error::{Error, Result};
use crate::interp::hermite_eval;
use crate::ode::{integrate_on_grid, Flow, StepControl};
use crate::specfun::QuadratureConfig;

/// w″ = −½ηw′ − sign(w)|w|^p + w/(1−p).
pub fn ode_rhs(p: f64, eta: f64, w: f64, wp: f64) -> f64 {
    let power = if w == 0.0 { 0.0 } else { w.signum() * w.abs().powf(p) };
    -0.5 * eta * wp - power + w / (1.0 - p)
}

/// Start of numerical integration; [0, SERIES_ETA] is covered by the series.
const SERIES_ETA: f64 = 1e-3;

/// Local expansion of the shot near η = 0, where |w|^p is not smooth:
/// w = sη − aη^{p+2} + bη³ + cη^{2p+3} + O(η^{p+4}).
pub fn series_start(p: f64, slope: f64, eta: f64) -> (f64, f64) {
    let s = slope;
    let a = s.powf(p) / ((p + 1.0) * (p + 2.0));
    let b = s * (1.0 / (1.0 - p) - 0.5) / 6.0;
    let c = p * s.powf(2.0 * p - 1.0) / ((p + 1.0) * (p + 2.0) * (2.0 * p + 2.0) * (2.0 * p + 3.0));
    let w = s * eta - a * eta.powf(p + 2.0) + b * eta.powi(3) + c * eta.powf(2.0 * p + 3.0);
    let wp =
        s - a * (p + 2.0) * eta.powf(p + 1.0) + 3.0 * b * eta * eta + c * (2.0 * p + 3.0) * eta.powf(2.0 * p + 2.0);
    (w, wp)
}

/// How a shot left the neighbourhood of the connecting orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShotOutcome {
    Overshoot { eta: f64 },
    Undershoot { eta: f64 },
    Converged { eta: f64 },
}

impl ShotOutcome {
    pub fn eta(&self) -> f64 {
        match *self {
            ShotOutcome::Overshoot { eta } | ShotOutcome::Undershoot { eta } | ShotOutcome::Converged { eta } => eta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingConfig {
    pub eta_max: f64,
    /// Spacing of the recorded profile grid.
    pub d_eta: f64,
    pub eps_class: f64,
    pub eps_plateau: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub first_step: f64,
    /// Relative disagreement between the bracketing shots at which the
    /// numerical trajectory is handed over to the analytic tail.
    pub match_tol: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            eta_max: 12.0,
            d_eta: 0.01,
            eps_class: 1e-9,
            eps_plateau: 1e-6,
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            first_step: 1e-6,
            match_tol: 1e-3,
        }
    }
}

impl ShootingConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.eta_max) || !pos(self.d_eta) || self.d_eta > self.eta_max {
            return Err(Error::Config(format!(
                "need 0 < d_eta <= eta_max, got d_eta = {}, eta_max = {}",
                self.d_eta, self.eta_max
            )));
        }
        if ![self.eps_class, self.eps_plateau, self.abs_tol, self.rel_tol, self.first_step, self.match_tol]
            .into_iter()
            .all(pos)
        {
            return Err(Error::Config("shooting tolerances must be positive".into()));
        }
        Ok(())
    }

    fn step_control(&self) -> StepControl {
        StepControl {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            first_step: self.first_step,
            max_step: self.d_eta,
            ..StepControl::default()
        }
    }

    fn grid(&self) -> Vec<f64> {
        let n = (self.eta_max / self.d_eta).round().max(1.0) as usize;
        let h = self.eta_max / n as f64;
        let mut g: Vec<f64> = (0..=n).map(|k| k as f64 * h).collect();
        g[n] = self.eta_max;
        g
    }
}

/// Samples of a shot at the grid points it reached.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub eta: Vec<f64>,
    pub w: Vec<f64>,
    pub w_prime: Vec<f64>,
    /// State at the last accepted step, which may lie between grid points.
    pub end: (f64, f64, f64),
}

/// Integrates the profile equation from w(0) = 0, w′(0) = slope and
/// classifies the shot against the plateau.
pub fn integrate_shot(p: f64, slope: f64, cfg: &ShootingConfig) -> Result<(Trajectory, ShotOutcome)> {
    if !(slope.is_finite() && slope > 0.0) {
        return Err(Error::domain("integrate_shot", format!("slope must be > 0, got {slope}")));
    }
    cfg.validate()?;
    let plateau = SharpnessConstants::new(p)?.plateau;
    let grid = cfg.grid();
    let over = plateau * (1.0 + cfg.eps_class);
    let under = plateau * (1.0 - cfg.eps_plateau);
    let mut outcome = None;
    let eta0 = SERIES_ETA.min(0.1 * grid[1]);
    let (w0, wp0) = series_start(p, slope, eta0);
    let mut run_grid = grid.clone();
    run_grid[0] = eta0;
    let (mut ys, t_end, y_end) = integrate_on_grid(
        |eta, y: &[f64; 2]| [y[1], ode_rhs(p, eta, y[0], y[1])],
        [w0, wp0],
        &run_grid,
        &cfg.step_control(),
        |eta, y| {
            if y[0] > over {
                outcome = Some(ShotOutcome::Overshoot { eta });
                Flow::Stop
            } else if y[1] <= 0.0 && y[0] < under {
                outcome = Some(ShotOutcome::Undershoot { eta });
                Flow::Stop
            } else {
                Flow::Continue
            }
        },
    )?;
    ys[0] = [0.0, slope];
    let outcome = outcome.unwrap_or_else(|| {
        let (w, wp) = (y_end[0], y_end[1]);
        if (w - plateau).abs() < cfg.eps_plateau && wp.abs() < cfg.eps_plateau {
            ShotOutcome::Converged { eta: t_end }
        } else if w >= plateau {
            ShotOutcome::Overshoot { eta: t_end }
        } else {
            ShotOutcome::Undershoot { eta: t_end }
        }
    });
    let traj = Trajectory {
        eta: grid[..ys.len()].to_vec(),
        w: ys.iter().map(|y| y[0]).collect(),
        w_prime: ys.iter().map(|y| y[1]).collect(),
        end: (t_end, y_end[0], y_end[1]),
    };
    Ok((traj, outcome))
}

/// True when the shot lies above the connecting orbit.
fn is_high(outcome: &ShotOutcome, traj: &Trajectory, plateau: f64) -> bool {
    match outcome {
        ShotOutcome::Overshoot { .. } => true,
        ShotOutcome::Undershoot { .. } => false,
        ShotOutcome::Converged { .. } => traj.end.1 >= plateau,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSolution {
    pub p: f64,
    pub slope0: f64,
    pub eta_max: f64,
    pub grid: Vec<f64>,
    pub w: Vec<f64>,
    pub w_prime: Vec<f64>,
    pub converged: bool,
    pub bracket: (f64, f64),
    pub plateau: f64,
    /// Where the integrated trajectory is joined to the linearized tail.
    pub match_eta: f64,
    /// Lower slope bounds with √(1+p) and with √(1−p) in the denominator.
    pub lower_bounds: (f64, f64),
}

impl ProfileSolution {
    /// Violations of the structural invariants; empty when the profile is sound.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut bad = Vec::new();
        if self.w.first() != Some(&0.0) {
            bad.push(format!("w(0) = {:?}", self.w.first()));
        }
        for (i, (&w, &wp)) in self.w.iter().zip(&self.w_prime).enumerate() {
            if !(0.0..self.plateau).contains(&w) {
                bad.push(format!("w = {w} outside [0, plateau) at eta = {}", self.grid[i]));
                break;
            }
            if i > 0 && wp <= 0.0 {
                bad.push(format!("w' = {wp} not positive at eta = {}", self.grid[i]));
                break;
            }
            if i > 0 && wp > self.w_prime[0] {
                bad.push(format!("w' exceeds w'(0) at eta = {}", self.grid[i]));
                break;
            }
        }
        let (lower, _) = self.lower_bounds;
        if !(lower < self.slope0 && self.slope0 < TWO_OVER_SQRT_PI) {
            bad.push(format!("slope0 = {} outside ({lower}, 2/sqrt(pi))", self.slope0));
        }
        bad
    }
}

/// Solves for the self-similar profile by bisection on the initial slope
/// over [0.9·slope_lower, 1.05·2/√π], stopping once the bracket is narrower
/// than `tol`.
pub fn solve_profile(p: f64, tol: f64, eta_max: f64) -> Result<ProfileSolution> {
    let cfg = ShootingConfig { eta_max, ..ShootingConfig::default() };
    solve_profile_with(p, tol, &cfg)
}

pub fn solve_profile_with(p: f64, tol: f64, cfg: &ShootingConfig) -> Result<ProfileSolution> {
    let consts = SharpnessConstants::new(p)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::domain("solve_profile", format!("tol must be > 0, got {tol}")));
    }
    cfg.validate()?;
    let plateau = consts.plateau;
    let mut lo = 0.9 * consts.slope_lower;
    let mut hi = 1.05 * TWO_OVER_SQRT_PI;
    let (mut lo_traj, lo_out) = integrate_shot(p, lo, cfg)?;
    let (mut hi_traj, hi_out) = integrate_shot(p, hi, cfg)?;
    let lo_high = is_high(&lo_out, &lo_traj, plateau);
    let hi_high = is_high(&hi_out, &hi_traj, plateau);
    if lo_high || !hi_high {
        return Err(Error::Solver(format!(
            "p = {p}: bracket [{lo}, {hi}] does not straddle the profile (lower shot {lo_out:?}, upper shot {hi_out:?})"
        )));
    }
    let mut iterations = 0;
    while hi - lo >= tol && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (traj, out) = integrate_shot(p, mid, cfg)?;
        if is_high(&out, &traj, plateau) {
            hi = mid;
            hi_traj = traj;
        } else {
            lo = mid;
            lo_traj = traj;
        }
        iterations += 1;
    }
    let converged = hi - lo < tol;
    let slope0 = 0.5 * (lo + hi);
    let (mid_traj, _) = integrate_shot(p, slope0, cfg)?;
    let grid = cfg.grid();

    // hand over where the bracketing shots stop agreeing with each other
    let reach = lo_traj.w.len().min(hi_traj.w.len()).min(mid_traj.w.len());
    let mut k_match = reach.saturating_sub(2).max(1);
    for k in 1..reach {
        let gap = plateau - mid_traj.w[k];
        if gap <= 0.0 || (hi_traj.w[k] - lo_traj.w[k]).abs() > cfg.match_tol * gap {
            k_match = k.saturating_sub(1).max(1);
            break;
        }
    }
    let qcfg = QuadratureConfig::default();
    let eta_m = grid[k_match];
    let (m_at, _) = decay_mode(eta_m, &qcfg)?;
    let amp = (plateau - mid_traj.w[k_match]) / m_at;

    let ceiling = f64::from_bits(plateau.to_bits() - 1);
    let mut w = Vec::with_capacity(grid.len());
    let mut w_prime = Vec::with_capacity(grid.len());
    for (k, &eta) in grid.iter().enumerate() {
        if k <= k_match {
            w.push(mid_traj.w[k]);
            w_prime.push(mid_traj.w_prime[k]);
        } else {
            let (m, dm) = decay_mode(eta, &qcfg)?;
            // the exact tail stays below the plateau; keep it so after rounding
            w.push((plateau - amp * m).min(ceiling));
            w_prime.push(-amp * dm);
        }
    }
    w[0] = 0.0;
    let sol = ProfileSolution {
        p,
        slope0,
        eta_max: cfg.eta_max,
        grid,
        w,
        w_prime,
        converged,
        bracket: (lo, hi),
        plateau,
        match_eta: eta_m,
        lower_bounds: (consts.slope_lower, consts.slope_lower_alt()),
    };
    let bad = sol.invariant_violations();
    if !bad.is_empty() {
        return Err(Error::Solver(format!("p = {p}: profile invariants violated: {}", bad.join("; "))));
    }
    Ok(sol)
}

/// Profile value at any η, odd in η and equal to ±plateau beyond eta_max.
pub fn odd_extend(profile: &ProfileSolution, eta: f64) -> f64 {
    let a = eta.abs();
    let v = if a >= profile.eta_max {
        profile.plateau
    } else {
        hermite_eval(&profile.grid, &profile.w, &profile.w_prime, a)
    };
    if eta < 0.0 {
        -v
    } else {
        v
    }
}

/// Derivative of [`odd_extend`], even in η and zero beyond eta_max.
pub fn odd_extend_deriv(profile: &ProfileSolution, eta: f64) -> f64 {
    let a = eta.abs();
    if a >= profile.eta_max {
        return 0.0;
    }
    crate::interp::hermite_deriv(&profile.grid, &profile.w, &profile.w_prime, a)
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{odd_extend, ProfileSolution};

/// Discretization of [−X, X] × [0, T].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_final: f64,
    /// Requested half-width X; rounded to a whole number of cells.
    pub x_half: f64,
    pub dx: f64,
    /// Number of time steps; rows sit at t_k = T(k/N)².
    pub nt: usize,
}

impl GridSpec {
    /// X = 8√T + 4, dx = 0.1, 64 time steps.
    pub fn for_horizon(t_final: f64) -> Self {
        Self { t_final, x_half: 8.0 * t_final.sqrt() + 4.0, dx: 0.1, nt: 64 }
    }

    /// Same domain with twice the density in x and t.
    pub fn refined(&self) -> Self {
        Self { dx: self.dx / 2.0, nt: self.nt * 2, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.t_final) {
            return Err(Error::domain("grid", format!("T must be > 0, got {}", self.t_final)));
        }
        if !pos(self.x_half) || !pos(self.dx) || self.dx > self.x_half {
            return Err(Error::Config(format!("need 0 < dx <= X, got dx = {}, X = {}", self.dx, self.x_half)));
        }
        if self.nt < 1 {
            return Err(Error::Config("need at least one time step".into()));
        }
        Ok(())
    }

    pub fn x_grid(&self) -> Vec<f64> {
        let half = (self.x_half / self.dx).round().max(1.0) as i64;
        (-half..=half).map(|i| i as f64 * self.dx).collect()
    }

    pub fn t_grid(&self) -> Vec<f64> {
        let n = self.nt as f64;
        let mut t: Vec<f64> = (0..=self.nt).map(|k| self.t_final * (k as f64 / n).powi(2)).collect();
        t[self.nt] = self.t_final;
        t
    }
}

/// How a field is continued outside [−X, X].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FarField {
    /// Each row is continued by its edge values.
    ConstantEdge,
}

/// Samples u(x_j, t_k); `values[k][j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeField {
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub far_field: FarField,
}

impl SpaceTimeField {
    pub fn zeros(grids: &GridSpec) -> Self {
        let x = grids.x_grid();
        let t = grids.t_grid();
        let values = vec![vec![0.0; x.len()]; t.len()];
        Self { x, t, values, far_field: FarField::ConstantEdge }
    }

    pub fn from_fn(grids: &GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut field = Self::zeros(grids);
        for (k, &t) in field.t.iter().enumerate() {
            for (j, &x) in field.x.iter().enumerate() {
                field.values[k][j] = f(x, t);
            }
        }
        field
    }

    pub fn dx(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    pub fn t_final(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    pub fn x_half(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.len() < 3 || self.t.len() < 2 {
            return Err(Error::Config("field needs at least 3 x points and 2 time rows".into()));
        }
        if self.t[0] != 0.0 {
            return Err(Error::Config("field time grid must start at 0".into()));
        }
        if !self.t.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("field time grid must be increasing".into()));
        }
        let h = self.dx();
        if !self.x.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h) {
            return Err(Error::Config("field x grid must be uniform".into()));
        }
        if self.values.len() != self.t.len() || self.values.iter().any(|r| r.len() != self.x.len()) {
            return Err(Error::Config("field values do not match its grids".into()));
        }
        if self.values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Config("field values must be finite".into()));
        }
        Ok(())
    }

    /// sup_x |g(u(x, t_k))|, far field included (it repeats the edge values).
    pub fn row_sup(&self, k: usize, g: impl Fn(f64) -> f64) -> f64 {
        self.values[k].iter().map(|&u| g(u).abs()).fold(0.0, f64::max)
    }

    /// Row of the field at time t, linear in time between stored rows.
    pub fn row_at(&self, t: f64) -> Vec<f64> {
        let n = self.t.len();
        if t <= 0.0 {
            return self.values[0].clone();
        }
        if t >= self.t[n - 1] {
            return self.values[n - 1].clone();
        }
        let m = self.t.partition_point(|&s| s <= t) - 1;
        let lam = (t - self.t[m]) / (self.t[m + 1] - self.t[m]);
        self.values[m].iter().zip(&self.values[m + 1]).map(|(a, b)| (1.0 - lam) * a + lam * b).collect()
    }
}

/// Tabulates u(x, t) = w(x/√t)·(ct)^{1/(1−p)}, zero at t = 0.
pub fn selfsim_field(profile: &ProfileSolution, c: f64, grids: &GridSpec) -> Result<SpaceTimeField> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::domain("selfsim_field", format!("c must be > 0, got {c}")));
    }
    grids.validate()?;
    let expo = 1.0 / (1.0 - profile.p);
    Ok(SpaceTimeField::from_fn(grids, |x, t| {
        if t == 0.0 {
            0.0
        } else {
            odd_extend(profile, x / t.sqrt()) * (c * t).powf(expo)
        }
    }))
}

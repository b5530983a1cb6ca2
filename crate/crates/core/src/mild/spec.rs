use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::closed_forms::{w0_odd, w0_odd_deriv, TWO_OVER_SQRT_PI};
use crate::error::{Error, Result};
use crate::interp::{hermite_deriv, hermite_eval};

/// The source term f of u_t − u_xx = f(u).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonlinearitySpec {
    Zero,
    Constant { c: f64 },
    Linear { a: f64 },
    PowerLaw { p: f64 },
    ScaledPowerLaw { c: f64, p: f64 },
}

fn signed_power(u: f64, p: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u.signum() * u.abs().powf(p)
    }
}

impl NonlinearitySpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64, name: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be finite, got {v}")))
            }
        };
        let exponent = |p: f64| {
            if p.is_finite() && p > 0.0 && p < 1.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("power-law exponent must lie in (0, 1), got {p}")))
            }
        };
        match *self {
            NonlinearitySpec::Zero => Ok(()),
            NonlinearitySpec::Constant { c } => finite(c, "constant"),
            NonlinearitySpec::Linear { a } => finite(a, "linear coefficient"),
            NonlinearitySpec::PowerLaw { p } => exponent(p),
            NonlinearitySpec::ScaledPowerLaw { c, p } => {
                exponent(p)?;
                if c.is_finite() && c > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!("power-law scale must be > 0, got {c}")))
                }
            }
        }
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            NonlinearitySpec::Zero => 0.0,
            NonlinearitySpec::Constant { c } => c,
            NonlinearitySpec::Linear { a } => a * u,
            NonlinearitySpec::PowerLaw { p } => signed_power(u, p),
            NonlinearitySpec::ScaledPowerLaw { c, p } => c * signed_power(u, p),
        }
    }

    /// (scale, exponent) for the power-law variants.
    pub fn power_law(&self) -> Option<(f64, f64)> {
        match *self {
            NonlinearitySpec::PowerLaw { p } => Some((1.0, p)),
            NonlinearitySpec::ScaledPowerLaw { c, p } => Some((c, p)),
            _ => None,
        }
    }
}

impl fmt::Display for NonlinearitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonlinearitySpec::Zero => write!(f, "zero"),
            NonlinearitySpec::Constant { c } => write!(f, "const:{c}"),
            NonlinearitySpec::Linear { a } => write!(f, "linear:{a}"),
            NonlinearitySpec::PowerLaw { p } => write!(f, "power:{p}"),
            NonlinearitySpec::ScaledPowerLaw { c, p } => write!(f, "scaled-power:{c}:{p}"),
        }
    }
}

fn parse_num(s: &str, what: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Config(format!("cannot parse {what} from '{s}'")))
}

impl FromStr for NonlinearitySpec {
    type Err = Error;

    /// `zero | const:C | linear:A | power:P | scaled-power:C:P`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let spec = match parts.as_slice() {
            ["zero"] => NonlinearitySpec::Zero,
            ["const", c] => NonlinearitySpec::Constant { c: parse_num(c, "constant")? },
            ["linear", a] => NonlinearitySpec::Linear { a: parse_num(a, "coefficient")? },
            ["power", p] => NonlinearitySpec::PowerLaw { p: parse_num(p, "exponent")? },
            ["scaled-power", c, p] => {
                NonlinearitySpec::ScaledPowerLaw { c: parse_num(c, "scale")?, p: parse_num(p, "exponent")? }
            }
            _ => {
                return Err(Error::Config(format!(
                    "unknown nonlinearity '{s}' (expected zero, const:C, linear:A, power:P or scaled-power:C:P)"
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Initial data u₀ with a bounded, piecewise continuous derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialDataSpec {
    Zero,
    Sinusoid {
        amplitude: f64,
        wavenumber: f64,
    },
    /// x ↦ λ·w₀(x/√λ), odd in x.
    ScaledW0 {
        lambda: f64,
    },
    /// Cubic Hermite data, continued by the edge values outside the grid.
    Tabulated {
        grid: Vec<f64>,
        values: Vec<f64>,
        derivative: Vec<f64>,
    },
}

impl InitialDataSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            InitialDataSpec::Zero => Ok(()),
            InitialDataSpec::Sinusoid { amplitude, wavenumber } => {
                if amplitude.is_finite() && wavenumber.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Config("sinusoid parameters must be finite".into()))
                }
            }
            InitialDataSpec::ScaledW0 { lambda } => {
                if lambda.is_finite() && *lambda > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!("w0 scale must be > 0, got {lambda}")))
                }
            }
            InitialDataSpec::Tabulated { grid, values, derivative } => {
                if grid.len() < 2 || grid.len() != values.len() || grid.len() != derivative.len() {
                    return Err(Error::Config("table needs at least two rows with x, u and u' on each".into()));
                }
                if !grid.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::Config("table x column must be strictly increasing".into()));
                }
                if grid.iter().chain(values).chain(derivative).any(|v| !v.is_finite()) {
                    return Err(Error::Config("table entries must be finite".into()));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            InitialDataSpec::Zero => 0.0,
            InitialDataSpec::Sinusoid { amplitude, wavenumber } => amplitude * (wavenumber * x).sin(),
            InitialDataSpec::ScaledW0 { lambda } => lambda * w0_odd(x / lambda.sqrt()),
            InitialDataSpec::Tabulated { grid, values, derivative } => {
                if x <= grid[0] {
                    values[0]
                } else if x >= grid[grid.len() - 1] {
                    values[values.len() - 1]
                } else {
                    hermite_eval(grid, values, derivative, x)
                }
            }
        }
    }

    /// u₀′(x), taken as 0 outside a table's range.
    pub fn deriv(&self, x: f64) -> f64 {
        match self {
            InitialDataSpec::Zero => 0.0,
            InitialDataSpec::Sinusoid { amplitude, wavenumber } => amplitude * wavenumber * (wavenumber * x).cos(),
            InitialDataSpec::ScaledW0 { lambda } => lambda.sqrt() * w0_odd_deriv(x / lambda.sqrt()),
            InitialDataSpec::Tabulated { grid, values, derivative } => {
                if x < grid[0] || x > grid[grid.len() - 1] {
                    0.0
                } else {
                    hermite_deriv(grid, values, derivative, x)
                }
            }
        }
    }

    /// ‖u₀′‖: the supremum of |u₀′| where the derivative is defined.
    pub fn deriv_sup(&self) -> f64 {
        match self {
            InitialDataSpec::Zero => 0.0,
            InitialDataSpec::Sinusoid { amplitude, wavenumber } => (amplitude * wavenumber).abs(),
            InitialDataSpec::ScaledW0 { lambda } => TWO_OVER_SQRT_PI * lambda.sqrt(),
            InitialDataSpec::Tabulated { grid, .. } => {
                let mut sup = 0.0f64;
                for w in grid.windows(2) {
                    for k in 0..=16 {
                        let x = w[0] + (w[1] - w[0]) * k as f64 / 16.0;
                        sup = sup.max(self.deriv(x).abs());
                    }
                }
                sup
            }
        }
    }

    /// Reads a table from CSV rows `x,u,du`; a non-numeric first row is a header.
    pub fn load_table(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let (mut grid, mut values, mut derivative) = (Vec::new(), Vec::new(), Vec::new());
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            let parsed: std::result::Result<Vec<f64>, _> = cols.iter().map(|c| c.trim().parse::<f64>()).collect();
            match parsed {
                Ok(v) if v.len() == 3 => {
                    grid.push(v[0]);
                    values.push(v[1]);
                    derivative.push(v[2]);
                }
                Err(_) if grid.is_empty() && i == 0 => continue,
                _ => return Err(Error::Config(format!("{}:{}: expected three numbers x,u,du", path.display(), i + 1))),
            }
        }
        let spec = InitialDataSpec::Tabulated { grid, values, derivative };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for InitialDataSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialDataSpec::Zero => write!(f, "zero"),
            InitialDataSpec::Sinusoid { amplitude, wavenumber } => write!(f, "sin:{amplitude}:{wavenumber}"),
            InitialDataSpec::ScaledW0 { lambda } => write!(f, "w0:{lambda}"),
            InitialDataSpec::Tabulated { grid, .. } => write!(f, "table[{} rows]", grid.len()),
        }
    }
}

impl FromStr for InitialDataSpec {
    type Err = Error;

    /// `zero | sin:A:K | w0:L | table:PATH`
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(path) = s.strip_prefix("table:") {
            return InitialDataSpec::load_table(Path::new(path));
        }
        let parts: Vec<&str> = s.split(':').collect();
        let spec = match parts.as_slice() {
            ["zero"] => InitialDataSpec::Zero,
            ["sin", a, k] => InitialDataSpec::Sinusoid {
                amplitude: parse_num(a, "amplitude")?,
                wavenumber: parse_num(k, "wavenumber")?,
            },
            ["w0", l] => InitialDataSpec::ScaledW0 { lambda: parse_num(l, "scale")? },
            _ => {
                return Err(Error::Config(format!(
                    "unknown initial data '{s}' (expected zero, sin:A:K, w0:L or table:PATH)"
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

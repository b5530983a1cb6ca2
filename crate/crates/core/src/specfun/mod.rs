//! Special functions and quadrature primitives.

mod abel;
mod erf;
mod gamma;
mod gauss;
mod tail;

pub use abel::{abel_integral, abel_integral_piecewise, integrate};
pub use erf::{erf, erfc, erfc_fn};
pub use gamma::{beta_fn, gamma_fn, ln_gamma};
pub use gauss::{gauss_hermite, gauss_legendre, hermite_rule, legendre_rule, GaussRule};
pub use tail::{tail_integral_I, tail_integral_scaled};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discretization settings shared by every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Nodes for Gaussian-weighted averages.
    pub gauss_hermite_order: usize,
    /// Gauss–Legendre nodes per panel after removing the Abel singularity.
    pub abel_nodes: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Truncation length for integrals over half-lines.
    pub tail_cutoff: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { gauss_hermite_order: 64, abel_nodes: 64, abs_tol: 1e-10, rel_tol: 1e-8, tail_cutoff: 14.0 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gauss_hermite_order < 2 {
            return Err(Error::Config(format!("gauss_hermite_order must be >= 2, got {}", self.gauss_hermite_order)));
        }
        if self.abel_nodes < 4 {
            return Err(Error::Config(format!("abel_nodes must be >= 4, got {}", self.abel_nodes)));
        }
        let tol_ok = |v: f64| v.is_finite() && v >= 0.0;
        if !tol_ok(self.abs_tol) || !tol_ok(self.rel_tol) {
            return Err(Error::Config("tolerances must be finite and non-negative".into()));
        }
        if self.abs_tol == 0.0 && self.rel_tol == 0.0 {
            return Err(Error::Config("abs_tol and rel_tol cannot both be zero".into()));
        }
        if !(self.tail_cutoff.is_finite() && self.tail_cutoff > 0.0) {
            return Err(Error::Config(format!("tail_cutoff must be positive, got {}", self.tail_cutoff)));
        }
        Ok(())
    }
}

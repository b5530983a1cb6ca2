//! Gaussian quadrature rules.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Nodes and weights of an n-point rule, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

const NEWTON_MAX: usize = 100;

/// Gauss–Hermite rule for ∫ g(w) e^{-w²} dw.
///
/// Roots of the orthonormal Hermite polynomials by Newton iteration, with the
/// classical asymptotic starting guesses for the largest roots.
pub fn gauss_hermite(order: usize) -> Result<GaussRule> {
    if order < 2 {
        return Err(Error::Config(format!("gauss_hermite order must be >= 2, got {order}")));
    }
    let n = order;
    let nf = n as f64;
    let pim4 = PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let mut z = 0.0_f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        let mut converged = false;
        for _ in 0..NEWTON_MAX {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Solver(format!("gauss_hermite({n}): Newton failed at root {i}")));
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[m - 1] = 0.0;
    }
    x.reverse();
    w.reverse();
    Ok(GaussRule { nodes: x, weights: w })
}

/// Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(order: usize) -> Result<GaussRule> {
    if order < 1 {
        return Err(Error::Config("gauss_legendre order must be >= 1".into()));
    }
    let n = order;
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..NEWTON_MAX {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    Ok(GaussRule { nodes: x, weights: w })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Family {
    Hermite,
    Legendre,
}

type RuleCache = Mutex<HashMap<(Family, usize), Arc<GaussRule>>>;

fn cached(family: Family, order: usize) -> Result<Arc<GaussRule>> {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&(family, order)) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(match family {
        Family::Hermite => gauss_hermite(order)?,
        Family::Legendre => gauss_legendre(order)?,
    });
    cache.lock().expect("rule cache poisoned").entry((family, order)).or_insert_with(|| Arc::clone(&rule));
    Ok(rule)
}

/// Shared, lazily built Gauss–Hermite table.
pub fn hermite_rule(order: usize) -> Result<Arc<GaussRule>> {
    cached(Family::Hermite, order)
}

/// Shared, lazily built Gauss–Legendre table.
pub fn legendre_rule(order: usize) -> Result<Arc<GaussRule>> {
    cached(Family::Legendre, order)
}

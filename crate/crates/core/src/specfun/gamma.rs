#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use crate::error::{Error, Result};

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

// Cody's rational approximation of Γ(1 + z) on 0 <= z < 1.
const CODY_P: [f64; 8] = [
    -1.716_185_138_865_494_925_338_11e0,
    2.476_565_080_557_591_991_083_14e1,
    -3.798_042_564_709_456_350_975_77e2,
    6.293_311_553_128_184_426_610_52e2,
    8.669_662_027_904_132_112_950_64e2,
    -3.145_127_296_884_836_752_543_57e4,
    -3.614_441_341_869_117_298_070_69e4,
    6.645_614_382_024_054_406_278_55e4,
];
const CODY_Q: [f64; 8] = [
    -3.084_023_001_197_389_752_543_53e1,
    3.153_506_269_796_041_615_291_44e2,
    -1.015_156_367_490_219_141_661_46e3,
    -3.107_771_671_572_311_094_404_44e3,
    2.253_811_842_098_015_103_301_12e4,
    4.755_846_277_527_881_107_678_15e3,
    -1.346_599_598_649_693_063_924_56e5,
    -1.151_322_596_755_534_834_972_11e5,
];

/// Γ(x) for 0.5 <= x < 12 by reduction to [1, 2) and upward recurrence.
fn gamma_cody(x: f64) -> f64 {
    let n = x.floor() as usize - usize::from(x >= 1.0);
    let (mut y, z) = if x < 1.0 { (x + 1.0, x) } else { (x - n as f64, x - n as f64 - 1.0) };
    let mut num = 0.0;
    let mut den = 1.0;
    for (p, q) in CODY_P.iter().zip(&CODY_Q) {
        num = (num + p) * z;
        den = den * z + q;
    }
    let mut r = num / den + 1.0;
    if x < 1.0 {
        return r / x;
    }
    for _ in 0..n {
        r *= y;
        y += 1.0;
    }
    r
}

fn check(op: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(op, format!("argument must be finite and positive, got {x}")));
    }
    Ok(())
}

/// Lanczos series for x >= 0.5; returns (t, series) with t = x + g - 1/2.
fn lanczos_parts(x: f64) -> (f64, f64) {
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + k as f64);
    }
    (z + LANCZOS_G + 0.5, a)
}

/// Gamma function for positive real arguments.
pub fn gamma_fn(x: f64) -> Result<f64> {
    check("gamma_fn", x)?;
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let g1 = gamma_fn(1.0 - x)?;
        return Ok(PI / ((PI * x).sin() * g1));
    }
    if x < 12.0 {
        return Ok(gamma_cody(x));
    }
    let (t, a) = lanczos_parts(x);
    Ok((2.0 * PI).sqrt() * t.powf(x - 0.5) * (-t).exp() * a)
}

/// Natural log of the gamma function for positive real arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    check("ln_gamma", x)?;
    if x < 0.5 {
        let lg1 = ln_gamma(1.0 - x)?;
        return Ok((PI / (PI * x).sin()).ln() - lg1);
    }
    let (t, a) = lanczos_parts(x);
    Ok(0.5 * (2.0 * PI).ln() + (x - 0.5) * t.ln() - t + a.ln())
}

/// Beta function B(a, b) through log-gamma.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    Ok((ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn special_values() {
        assert_relative_eq!(gamma_fn(1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma_fn(0.5).unwrap(), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma_fn(2.5).unwrap(), 0.75 * PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma_fn(5.0).unwrap(), 24.0, max_relative = 1e-14);
        assert_eq!(gamma_fn(2.5).unwrap(), 1.329_340_388_179_137);
        assert_eq!(gamma_fn(3.0).unwrap(), 2.0);
        assert_relative_eq!(gamma_fn(11.5).unwrap(), 11_899_423.083_962_248, max_relative = 1e-15);
        // 20! = Γ(21)
        assert_relative_eq!(gamma_fn(21.0).unwrap(), 2_432_902_008_176_640_000.0, max_relative = 1e-13);
    }

    #[test]
    fn recurrence() {
        for x in [0.5, 1.3, 7.7, 0.1, 33.3] {
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
    }

    #[test]
    fn log_gamma_agrees() {
        for x in [0.3, 0.5, 1.0, 2.5, 10.0, 49.5] {
            assert_relative_eq!(ln_gamma(x).unwrap().exp(), gamma_fn(x).unwrap(), max_relative = 1e-12);
        }
        // Γ(200) overflows but its log does not
        assert!(ln_gamma(200.0).unwrap().is_finite());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
        assert!(gamma_fn(f64::NAN).is_err());
        assert!(gamma_fn(f64::INFINITY).is_err());
    }

    #[test]
    fn beta_integrals() {
        assert_relative_eq!(beta_fn(2.0, 0.5).unwrap(), 4.0 / 3.0, max_relative = 1e-13);
        assert_relative_eq!(beta_fn(3.0, 0.5).unwrap(), 16.0 / 15.0, max_relative = 1e-13);
    }
}

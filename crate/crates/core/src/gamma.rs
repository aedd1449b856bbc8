//! Gamma function.
//!
//! Lanczos approximation (g = 7, nine coefficients) for `x >= 0.5` and the
//! reflection formula below that.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Γ(x). Fails at the poles `0, -1, -2, ...`.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() || is_pole(x) {
        return Err(Error::GammaPole(x));
    }
    Ok(gamma_unchecked(x))
}

/// 1/Γ(x), extended by zero at the poles.
pub fn recip_gamma(x: f64) -> f64 {
    if is_pole(x) {
        0.0
    } else {
        1.0 / gamma_unchecked(x)
    }
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma_unchecked(1.0 - x))
    } else {
        // Exact for small integers.
        if x == x.floor() && x <= 23.0 {
            return (1..x as u32).fold(1.0, |acc, k| acc * k as f64);
        }
        let z = x - 1.0;
        let mut sum = LANCZOS_COEFFS[0];
        for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            sum += c / (z + i as f64);
        }
        let w = z + LANCZOS_G + 0.5;
        // Split the power to keep w^(z+1/2) finite up to x ~ 171.
        let half = w.powf(0.5 * (z + 0.5));
        (2.0 * PI).sqrt() * half * (half * (-w).exp()) * sum
    }
}

//! Complex gamma function family.
//!
//! A Lanczos approximation (g = 7, nine coefficients) covers `Re z >= 1/2`;
//! the left half-plane is reached through the reflection formula. The
//! logarithm is only provided on `Re z > 0`, where the Lanczos sum has a
//! continuous branch.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Distance to a non-positive integer below which `gamma` reports a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

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

// ln(sqrt(2 pi))
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Distance from `z` to the nearest non-positive integer, or `None` when
/// `Re z` is far enough right that no pole is close.
fn pole_distance(z: Complex64) -> Option<f64> {
    if z.re > 0.5 {
        return None;
    }
    let k = z.re.round().min(0.0);
    Some(Complex64::new(z.re - k, z.im).norm())
}

/// `sin(pi z)` with the real part reduced first, so that the zeros at the
/// integers are exact and nearby values keep their relative accuracy.
pub fn sin_pi(z: Complex64) -> Complex64 {
    let n = z.re.round();
    let reduced = Complex64::new(z.re - n, z.im) * PI;
    let s = reduced.sin();
    if (n as i64).rem_euclid(2) == 0 {
        s
    } else {
        -s
    }
}

/// The Lanczos series `A(z)` and log prefactor, valid for `Re z >= 1/2`.
fn lanczos_log(z: Complex64) -> Complex64 {
    let zm1 = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (k, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += *c / (zm1 + k as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (zm1 + 0.5) * t.ln() - t + series.ln()
}

/// Complex gamma function.
///
/// Fails with [`Error::Pole`] within `1e-12` of a non-positive integer and
/// with [`Error::Overflow`] when the value leaves double range.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if let Some(d) = pole_distance(z) {
        if d < POLE_TOLERANCE {
            return Err(Error::Pole { re: z.re, im: z.im });
        }
    }
    let value = if z.re < 0.5 {
        // Gamma(z) = pi / (sin(pi z) Gamma(1 - z))
        let log_reflected = lanczos_log(1.0 - z);
        let log_value = PI.ln() - sin_pi(z).ln() - log_reflected;
        guarded_exp(log_value)?
    } else {
        guarded_exp(lanczos_log(z))?
    };
    Ok(value)
}

fn guarded_exp(w: Complex64) -> Result<Complex64> {
    if w.re > 709.0 {
        return Err(Error::Overflow { exponent: w.re });
    }
    Ok(w.exp())
}

/// Beyond this modulus `log_gamma` switches to the Stirling series.
const STIRLING_MIN: f64 = 15.0;

// B_{2k} / (2k (2k - 1)), k = 1..8
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

fn stirling_log(z: Complex64) -> Complex64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING_COEFFS {
        corr += c * p;
        p *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + corr
}

/// Principal branch of `log Gamma(z)` on the right half-plane.
///
/// Callers needing `Re z <= 0` shift with the recurrence first.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) || !z.im.is_finite() {
        return Err(Error::Domain {
            op: "log_gamma",
            detail: format!("Re z = {} must be positive", z.re),
        });
    }
    if z.norm() >= STIRLING_MIN {
        Ok(stirling_log(z))
    } else if z.re >= 0.5 {
        Ok(lanczos_log(z))
    } else {
        Ok(lanczos_log(z + 1.0) - z.ln())
    }
}

/// Reciprocal gamma function, entire; vanishes at the non-positive integers.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        if let Some(d) = pole_distance(z) {
            if d < POLE_TOLERANCE {
                return Complex64::new(0.0, 0.0);
            }
        }
        // 1/Gamma(z) = Gamma(1 - z) sin(pi z) / pi
        let w = lanczos_log(1.0 - z);
        if w.re > 709.0 {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        w.exp() * sin_pi(z) / PI
    } else {
        (-lanczos_log(z)).exp()
    }
}

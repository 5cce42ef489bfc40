//! Complex gamma function (Lanczos approximation, g = 7).
//!
//! Used to normalize Mellin measures and to evaluate continuation models;
//! relative accuracy is close to machine precision away from the poles.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma(z) for complex z. Returns non-finite values at the poles
/// (non-positive integers); use [`gamma_checked`] when a pole is an error.
pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
        let pi_z = z * PI;
        return PI / (pi_z.sin() * gamma(Complex64::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * acc
}

/// Gamma(z), rejecting poles and overflow.
pub fn gamma_checked(z: Complex64) -> Result<Complex64> {
    let near_pole =
        z.re <= 0.5 && z.im.abs() < 1e-10 && (z.re - z.re.round()).abs() < 1e-10 && z.re.round() <= 0.0;
    if near_pole {
        return Err(Error::input(format!(
            "gamma normalizer at {z} sits on or next to a pole"
        )));
    }
    let g = gamma(z);
    if !g.re.is_finite() || !g.im.is_finite() || g.norm() == 0.0 {
        return Err(Error::input(format!(
            "gamma normalizer evaluated at {z} is singular or overflows"
        )));
    }
    Ok(g)
}

/// ln Gamma on the positive real axis (real part of the Lanczos form).
pub fn ln_gamma_real(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma_real requires x > 0");
    gamma(Complex64::new(x, 0.0)).re.ln()
}

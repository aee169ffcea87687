//! Complex Gamma function via the Lanczos approximation (g = 7, n = 9) on
//! `Re z ≥ 1/2`, extended to the left half-plane by reflection.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
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

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

fn pole_check(z: Complex64) -> Result<()> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole { location: z });
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("gamma argument {z} is not finite")));
    }
    Ok(())
}

/// `ln Γ(z)` for `Re z ≥ 1/2` (principal branch of the Lanczos form).
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let zm = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        series += c / (zm + i as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (zm + 0.5) * t.ln() - t + series.ln()
}

/// `ln sin(πz)`, stable for large `|Im z|` where `sin` itself overflows.
pub fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() <= 20.0 {
        return sin_pi(z).ln();
    }
    // sin(πz) = (e^{iπz} − e^{−iπz}) / 2i; one exponential dominates.
    let iz = Complex64::new(0.0, PI) * z;
    let ln_2i = Complex64::new(0.0, 2.0).ln();
    if z.im > 0.0 {
        // sin(πz) = −e^{−iπz} (1 − e^{2iπz}) / 2i
        -iz + (1.0 - (2.0 * iz).exp()).ln() - ln_2i + Complex64::new(0.0, PI)
    } else {
        // sin(πz) = e^{iπz} (1 − e^{−2iπz}) / 2i
        iz + (1.0 - (-2.0 * iz).exp()).ln() - ln_2i
    }
}

/// `sin(πz)` with exact zeros at the integers on the real axis.
pub fn sin_pi(z: Complex64) -> Complex64 {
    let re = z.re;
    let n = re.round();
    let frac = re - n;
    // sin(π(n + f) + iπy) = (−1)^n sin(πf + iπy)
    let sign = if (n as i64).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let w = Complex64::new(PI * frac, PI * z.im);
    let s = if frac == 0.0 {
        Complex64::new(0.0, (PI * z.im).sinh())
    } else {
        w.sin()
    };
    sign * s
}

/// `ln Γ(z)`, a branch of the complex log-Gamma (not necessarily the
/// principal one in the left half-plane). Only `exp` of the result and its
/// real part are meaningful to callers.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    pole_check(z)?;
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z))
    } else {
        // Γ(z) = π / (sin(πz) Γ(1−z))
        Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_right(1.0 - z))
    }
}

/// Complex Gamma function. Poles at the nonpositive integers are reported
/// with their location.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    pole_check(z)?;
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z).exp())
    } else {
        let s = sin_pi(z);
        if s.norm() > 1e-300 && s.norm().is_finite() {
            Ok(PI / (s * ln_gamma_right(1.0 - z).exp()))
        } else {
            Ok(ln_gamma(z)?.exp())
        }
    }
}

/// Real Gamma function.
pub fn gamma_real(x: f64) -> Result<f64> {
    gamma(Complex64::new(x, 0.0)).map(|g| g.re)
}

/// Reciprocal Gamma `1/Γ(x)` for real `x`, entire: exactly zero at the
/// nonpositive integers.
pub fn rgamma_real(x: f64) -> f64 {
    if x <= 0.0 && x == x.round() {
        return 0.0;
    }
    if x >= 0.5 {
        (-ln_gamma_right(Complex64::new(x, 0.0))).exp().re
    } else {
        // 1/Γ(x) = sin(πx) Γ(1−x) / π
        let s = sin_pi(Complex64::new(x, 0.0)).re;
        s * ln_gamma_right(Complex64::new(1.0 - x, 0.0)).exp().re / PI
    }
}

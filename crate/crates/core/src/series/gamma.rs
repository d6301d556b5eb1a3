//! Complex Gamma function: Lanczos approximation (g = 7, 9 terms) with the
//! reflection formula for Re z < 1/2.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const G: f64 = 7.0;
const COEFFS: [f64; 9] = [
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

/// Γ(z). Fails at 0, −1, −2, … (within 1e−14).
pub fn complex_gamma(z: Complex64) -> Result<Complex64> {
    if z.im.abs() < 1e-14 && z.re <= 0.5 && (z.re - z.re.round()).abs() < 1e-14 {
        return Err(Error::GammaPole(crate::scalars::text::format_complex(z)));
    }
    if z.re < 0.5 {
        let s = (Complex64::new(PI, 0.0) * z).sin();
        return Ok(Complex64::new(PI, 0.0) / (s * complex_gamma(Complex64::new(1.0, 0.0) - z)?));
    }
    Ok(lanczos_ln(z).exp())
}

/// ln Γ(z) for Re z ≥ 1/2 (principal branch of the Lanczos form).
fn lanczos_ln(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = Complex64::new(COEFFS[0], 0.0);
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// 1/Γ(z), zero at the poles of Γ.
pub fn reciprocal_gamma(z: Complex64) -> Complex64 {
    match complex_gamma(z) {
        Ok(g) => 1.0 / g,
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn known_values() {
        assert!(rel(complex_gamma(c(1.0, 0.0)).unwrap(), c(1.0, 0.0)) < 1e-14);
        assert!(rel(complex_gamma(c(5.0, 0.0)).unwrap(), c(24.0, 0.0)) < 1e-14);
        assert!(rel(complex_gamma(c(0.5, 0.0)).unwrap(), c(PI.sqrt(), 0.0)) < 1e-14);
        // Γ(−1/2) = −2√π
        assert!(rel(complex_gamma(c(-0.5, 0.0)).unwrap(), c(-2.0 * PI.sqrt(), 0.0)) < 1e-14);
        // 19! = 121645100408832000
        assert!(rel(complex_gamma(c(20.0, 0.0)).unwrap(), c(121_645_100_408_832_000.0, 0.0)) < 1e-13);
    }

    #[test]
    fn poles() {
        for n in [0.0, -1.0, -7.0] {
            assert!(matches!(complex_gamma(c(n, 0.0)), Err(Error::GammaPole(_))));
        }
        assert_eq!(reciprocal_gamma(c(-3.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn modulus_on_imaginary_axis() {
        // |Γ(iy)|² = π / (y sinh πy)
        for y in [0.3, 1.0, 2.5] {
            let g = complex_gamma(c(0.0, y)).unwrap();
            let want = PI / (y * (PI * y).sinh());
            assert!((g.norm_sqr() - want).abs() / want < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn recurrence(re in -15.0f64..15.0, im in -3.0f64..3.0) {
            let z = c(re, im);
            prop_assume!((z - c(z.re.round(), 0.0)).norm() > 1e-3);
            let lhs = complex_gamma(z + 1.0).unwrap();
            let rhs = z * complex_gamma(z).unwrap();
            prop_assert!(rel(lhs, rhs) < 1e-12);
        }

        #[test]
        fn reflection(re in -9.0f64..10.0, im in -2.0f64..2.0) {
            let z = c(re, im);
            prop_assume!((z - c(z.re.round(), 0.0)).norm() > 1e-3);
            let lhs = complex_gamma(z).unwrap() * complex_gamma(c(1.0, 0.0) - z).unwrap();
            let rhs = c(PI, 0.0) / (c(PI, 0.0) * z).sin();
            prop_assert!(rel(lhs, rhs) < 1e-12);
        }
    }
}

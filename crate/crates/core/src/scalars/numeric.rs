use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Scalar, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// A field element evaluated at a parameter point p and at the inverted
/// point p^∨. Arithmetic is componentwise; dualizing swaps the components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairedScalar {
    pub value: Complex64,
    pub dual: Complex64,
}

impl PairedScalar {
    pub fn new(value: Complex64, dual: Complex64) -> Self {
        PairedScalar { value, dual }
    }

    /// A generator: `z` at p and `1/z` at p^∨.
    pub fn from_unit(z: Complex64) -> Self {
        PairedScalar {
            value: z,
            dual: z.inv(),
        }
    }

    pub fn real(x: f64) -> Self {
        let z = Complex64::new(x, 0.0);
        PairedScalar { value: z, dual: z }
    }

    pub fn is_zero_tol(&self, tol: f64) -> bool {
        self.value.norm() <= tol && self.dual.norm() <= tol
    }

    fn split(m: &SquareMatrix<Self>) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
        let n = m.size();
        (
            DMatrix::from_fn(n, n, |i, j| m.get(i, j).value),
            DMatrix::from_fn(n, n, |i, j| m.get(i, j).dual),
        )
    }
}

impl fmt::Display for PairedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::text::format_complex(self.value))
    }
}

impl Scalar for PairedScalar {
    const EXACT: bool = false;

    fn zero() -> Self {
        PairedScalar::real(0.0)
    }
    fn one() -> Self {
        PairedScalar::real(1.0)
    }
    fn from_int(n: i64) -> Self {
        PairedScalar::real(n as f64)
    }
    fn add(&self, rhs: &Self) -> Self {
        PairedScalar::new(self.value + rhs.value, self.dual + rhs.dual)
    }
    fn sub(&self, rhs: &Self) -> Self {
        PairedScalar::new(self.value - rhs.value, self.dual - rhs.dual)
    }
    fn mul(&self, rhs: &Self) -> Self {
        PairedScalar::new(self.value * rhs.value, self.dual * rhs.dual)
    }
    fn neg(&self) -> Self {
        PairedScalar::new(-self.value, -self.dual)
    }
    fn try_div(&self, rhs: &Self, tol: f64) -> Result<Self> {
        let tiny = tol.max(f64::MIN_POSITIVE);
        if rhs.value.norm() <= tiny || rhs.dual.norm() <= tiny {
            return Err(Error::DenominatorVanishes(format!(
                "|{}| <= {tiny:e}",
                super::text::format_complex(rhs.value)
            )));
        }
        Ok(PairedScalar::new(self.value / rhs.value, self.dual / rhs.dual))
    }
    fn dualize(&self) -> Self {
        PairedScalar::new(self.dual, self.value)
    }
    fn is_zero(&self) -> bool {
        self.is_zero_tol(DEFAULT_TOL)
    }
    fn residual(&self) -> f64 {
        self.value.norm().max(self.dual.norm())
    }

    fn determinant(m: &SquareMatrix<Self>) -> Self {
        let (v, d) = Self::split(m);
        PairedScalar::new(v.determinant(), d.determinant())
    }

    fn inverse(m: &SquareMatrix<Self>) -> Result<SquareMatrix<Self>> {
        let n = m.size();
        let (v, d) = Self::split(m);
        let vi = v.try_inverse().ok_or(Error::Singular)?;
        let di = d.try_inverse().ok_or(Error::Singular)?;
        Ok(SquareMatrix::from_fn(n, |i, j| {
            PairedScalar::new(vi[(i, j)], di[(i, j)])
        }))
    }

    /// Numerical rank of the value component: singular values above
    /// `tol · σ_max` count, and values inside `[tol, 1e3·tol]·σ_max` are
    /// reported as ambiguous.
    fn rank(rows: usize, cols: usize, entries: &[Self], tol: f64) -> Result<usize> {
        if rows == 0 || cols == 0 {
            return Ok(0);
        }
        let a = DMatrix::from_fn(rows, cols, |i, j| entries[i * cols + j].value);
        numeric_rank(&a, tol)
    }
}

pub(crate) fn numeric_rank(a: &DMatrix<Complex64>, tol: f64) -> Result<usize> {
    let sv = a.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(0);
    }
    let low = tol * smax;
    let high = 1e3 * tol * smax;
    let mut rank = 0;
    for &s in sv.iter() {
        if s > high {
            rank += 1;
        } else if s > low {
            return Err(Error::RankToleranceAmbiguous {
                residual: s / smax,
                low: tol,
                high: 1e3 * tol,
            });
        }
    }
    Ok(rank)
}

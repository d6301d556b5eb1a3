//! The coefficient field ℂ(α, β, γ₁ … γₘ) and its ∨-involution
//! (α, β, γₖ ↦ α⁻¹, β⁻¹, γₖ⁻¹).
//!
//! Two backings implement [`Scalar`]: [`ExactScalar`] (rational functions
//! over ℚ with Laurent exponents) and [`PairedScalar`] (a complex value at a
//! parameter point together with its value at the inverted point).

mod exact;
mod exact_linalg;
mod numeric;
pub mod poly;
pub mod text;

use std::fmt;

pub use exact::ExactScalar;
pub use numeric::PairedScalar;
pub use poly::{LaurentPoly, Monomial, MAX_VARS};

use crate::error::{Error, Result};
use crate::indexing::BinaryIndex;
use crate::matrix::SquareMatrix;
use crate::params::ParameterPoint;

/// Default tolerance for numeric zero and denominator tests.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Field element contract shared by both backings.
pub trait Scalar: Clone + fmt::Debug + fmt::Display + Send + Sync + 'static {
    /// True for the exact backing; numeric results carry residuals instead.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;

    /// Division; numeric backings reject divisors below `tol`.
    fn try_div(&self, rhs: &Self, tol: f64) -> Result<Self>;

    fn dualize(&self) -> Self;

    /// Exact: structurally zero. Numeric: both components below [`DEFAULT_TOL`].
    fn is_zero(&self) -> bool;

    /// Size used for residual reporting: 0 or ∞ for exact scalars, the
    /// larger component modulus for numeric ones.
    fn residual(&self) -> f64;

    fn determinant(m: &SquareMatrix<Self>) -> Self;
    fn inverse(m: &SquareMatrix<Self>) -> Result<SquareMatrix<Self>>;
    /// Rank of a row-major `rows × cols` matrix.
    fn rank(rows: usize, cols: usize, entries: &[Self], tol: f64) -> Result<usize>;

    fn powi(&self, e: i32, tol: f64) -> Result<Self> {
        let base = if e < 0 {
            Self::one().try_div(self, tol)?
        } else {
            self.clone()
        };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    fn sum<'a, I: IntoIterator<Item = &'a Self>>(items: I) -> Self {
        items.into_iter().fold(Self::zero(), |acc, x| acc.add(x))
    }
}

/// The distinguished generators α, β, γ₁ … γₘ in a given backing.
#[derive(Clone, Debug)]
pub struct Generators<S> {
    m: usize,
    alpha: S,
    beta: S,
    gammas: Vec<S>,
    tol: f64,
}

impl<S: Scalar> Generators<S> {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        1 << self.m
    }

    pub fn alpha(&self) -> &S {
        &self.alpha
    }

    pub fn beta(&self) -> &S {
        &self.beta
    }

    /// γₖ for 1 ≤ k ≤ m.
    pub fn gamma(&self, k: usize) -> &S {
        &self.gammas[k - 1]
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn div(&self, num: &S, den: &S) -> Result<S> {
        num.try_div(den, self.tol)
    }

    pub fn inv(&self, s: &S) -> Result<S> {
        S::one().try_div(s, self.tol)
    }

    /// ∏ₖ γₖ^{e·iₖ}.
    pub fn gamma_power(&self, index: &BinaryIndex, e: i32) -> Result<S> {
        let mut acc = S::one();
        for k in 1..=self.m {
            if index.bit(k) == 1 {
                acc = acc.mul(&self.gamma(k).powi(e, self.tol)?);
            }
        }
        Ok(acc)
    }

    /// ∏ₖ γₖ.
    pub fn gamma_product(&self) -> S {
        self.gammas.iter().fold(S::one(), |acc, g| acc.mul(g))
    }

    /// λ = (−1)^{m−1} α⁻¹ β⁻¹ ∏ γₖ.
    pub fn lambda(&self) -> Result<S> {
        let ab = self.alpha.mul(&self.beta);
        let l = self.div(&self.gamma_product(), &ab)?;
        Ok(if self.m.is_multiple_of(2) { l.neg() } else { l })
    }
}

impl Generators<ExactScalar> {
    /// Indeterminates α, β, γ₁ … γₘ.
    pub fn symbolic(m: usize) -> Result<Self> {
        if m == 0 || m + 2 > MAX_VARS {
            return Err(Error::InvalidArgument(format!(
                "exact backing supports 1 <= m <= {}, got {m}",
                MAX_VARS - 2
            )));
        }
        Ok(Generators {
            m,
            alpha: ExactScalar::var(0),
            beta: ExactScalar::var(1),
            gammas: (1..=m).map(|k| ExactScalar::var(k + 1)).collect(),
            tol: 0.0,
        })
    }
}

impl Generators<PairedScalar> {
    /// Exponentials of a concrete parameter point, paired with their inverses.
    pub fn numeric(point: &ParameterPoint, tol: f64) -> Self {
        Generators {
            m: point.m(),
            alpha: PairedScalar::from_unit(point.alpha()),
            beta: PairedScalar::from_unit(point.beta()),
            gammas: (1..=point.m())
                .map(|k| PairedScalar::from_unit(point.gamma(k)))
                .collect(),
            tol,
        }
    }
}

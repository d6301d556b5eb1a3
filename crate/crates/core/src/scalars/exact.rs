use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{LaurentPoly, Monomial};
use super::{exact_linalg, Scalar};
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// A normalized polynomial factor: at least two terms, every variable's
/// minimum exponent zero, coprime integer coefficients, positive leading
/// coefficient. Associates share one normal form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Atom(Arc<LaurentPoly>);

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Splits a nonzero polynomial as `coeff · unit · atom`.
fn normalize(p: &LaurentPoly) -> (BigInt, Monomial, Option<Atom>) {
    debug_assert!(!p.is_zero());
    if p.len() == 1 {
        let (m, c) = &p.terms()[0];
        return (c.clone(), *m, None);
    }
    let unit = p.min_exponents();
    let content = p.content();
    let shifted = p.shift(unit.inv()).div_scalar_exact(&content);
    (content, unit, Some(Atom(Arc::new(shifted))))
}

/// Element of ℚ(α, β, γ) kept as `coeff · unit · ∏ atomᵉ`.
///
/// Numerator and denominator are products of polynomial factors, expanded
/// only when a sum forces it. No gcd is ever computed; after a sum the new
/// factor is trial-divided by the denominator factors it may cancel.
#[derive(Clone)]
pub struct ExactScalar {
    coeff: BigRational,
    unit: Monomial,
    factors: BTreeMap<Atom, i32>,
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar {
            coeff: BigRational::zero(),
            unit: Monomial::ONE,
            factors: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(q: BigRational) -> Self {
        ExactScalar {
            coeff: q,
            unit: Monomial::ONE,
            factors: BTreeMap::new(),
        }
    }

    /// The generator with variable index `i` (0 = α, 1 = β, k+1 = γₖ).
    pub fn var(i: usize) -> Self {
        ExactScalar {
            coeff: BigRational::one(),
            unit: Monomial::var(i, 1),
            factors: BTreeMap::new(),
        }
    }

    pub fn from_poly(p: &LaurentPoly) -> Self {
        if p.is_zero() {
            return Self::zero();
        }
        let (c, unit, atom) = normalize(p);
        let mut factors = BTreeMap::new();
        if let Some(a) = atom {
            factors.insert(a, 1);
        }
        ExactScalar {
            coeff: BigRational::from_integer(c),
            unit,
            factors,
        }
    }

    /// `num / den`; fails when `den` is the zero polynomial.
    pub fn from_fraction(num: &LaurentPoly, den: &LaurentPoly) -> Result<Self> {
        let d = Self::from_poly(den);
        Self::from_poly(num).checked_div(&d)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut factors = self.factors.clone();
        for (a, &e) in &other.factors {
            bump(&mut factors, a, e);
        }
        ExactScalar {
            coeff: &self.coeff * &other.coeff,
            unit: self.unit * other.unit,
            factors,
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(ExactScalar {
            coeff: self.coeff.recip(),
            unit: self.unit.inv(),
            factors: self.factors.iter().map(|(a, &e)| (a.clone(), -e)).collect(),
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// Division followed by cancellation of numerator factors against
    /// denominator factors, for quotients known to simplify.
    pub fn div_cancel(&self, other: &Self) -> Result<Self> {
        let mut q = self.checked_div(other)?;
        q.cancel();
        Ok(q)
    }

    pub fn neg(&self) -> Self {
        ExactScalar {
            coeff: -&self.coeff,
            unit: self.unit,
            factors: self.factors.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.unit == other.unit && self.factors == other.factors {
            let coeff = &self.coeff + &other.coeff;
            if coeff.is_zero() {
                return Self::zero();
            }
            return ExactScalar {
                coeff,
                unit: self.unit,
                factors: self.factors.clone(),
            };
        }

        // Pull out the common part g = unit · ∏ atom^{min(e_s, e_t)}.
        let unit = self.unit.meet(other.unit);
        let mut common: BTreeMap<Atom, i32> = BTreeMap::new();
        for (a, &e) in &self.factors {
            let g = e.min(other.factors.get(a).copied().unwrap_or(0));
            if g != 0 {
                common.insert(a.clone(), g);
            }
        }
        for (a, &e) in &other.factors {
            if !self.factors.contains_key(a) && e < 0 {
                common.insert(a.clone(), e);
            }
        }
        let lcm = self.coeff.denom().lcm(other.coeff.denom());
        let ps = self.cofactor(unit, &common, &lcm);
        let pt = other.cofactor(unit, &common, &lcm);
        let sum = ps.add(&pt);
        if sum.is_zero() {
            return Self::zero();
        }

        let (c, u, atom) = normalize(&sum);
        let mut factors = common;
        let mut coeff = BigRational::new(c, lcm);
        let mut unit = unit * u;
        if let Some(mut atom) = atom {
            // Cancel against denominator factors of the common part.
            let dens: Vec<Atom> = factors.iter().filter(|(_, &e)| e < 0).map(|(a, _)| a.clone()).collect();
            let mut remaining = Some(atom.clone());
            'outer: for d in dens {
                while factors.get(&d).copied().unwrap_or(0) < 0 {
                    let Some(cur) = remaining.as_ref() else {
                        break 'outer;
                    };
                    match cur.0.div_exact(&d.0) {
                        Some(q) => {
                            bump(&mut factors, &d, 1);
                            let (qc, qu, qa) = normalize(&q);
                            coeff *= BigRational::from_integer(qc);
                            unit = unit * qu;
                            remaining = qa;
                        }
                        None => break,
                    }
                }
            }
            if let Some(a) = remaining.take() {
                atom = a;
                bump(&mut factors, &atom, 1);
            }
        }
        ExactScalar { coeff, unit, factors }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Expanded `lcm · self / (unit · common)`; every remaining exponent is
    /// non-negative by construction of `common`.
    fn cofactor(&self, unit: Monomial, common: &BTreeMap<Atom, i32>, lcm: &BigInt) -> LaurentPoly {
        let scale = self.coeff.numer() * (lcm / self.coeff.denom());
        let mut parts: Vec<(&Atom, u32)> = Vec::new();
        for (a, &e) in &self.factors {
            let k = e - common.get(a).copied().unwrap_or(0);
            debug_assert!(k >= 0);
            if k > 0 {
                parts.push((a, k as u32));
            }
        }
        for (a, &g) in common {
            if g < 0 && !self.factors.contains_key(a) {
                parts.push((a, (-g) as u32));
            }
        }
        parts.sort_by_key(|(a, k)| a.0.len() * *k as usize);
        let mut acc = LaurentPoly::monomial(self.unit / unit, scale);
        for (a, k) in parts {
            for _ in 0..k {
                acc = acc.mul(&a.0);
            }
        }
        acc
    }

    /// Trial-divides numerator factors by denominator factors.
    pub fn cancel(&mut self) {
        let dens: Vec<Atom> = self
            .factors
            .iter()
            .filter(|(_, &e)| e < 0)
            .map(|(a, _)| a.clone())
            .collect();
        for d in dens {
            loop {
                if self.factors.get(&d).copied().unwrap_or(0) >= 0 {
                    break;
                }
                let nums: Vec<Atom> = self
                    .factors
                    .iter()
                    .filter(|(a, &e)| e > 0 && a.0.len() >= d.0.len())
                    .map(|(a, _)| a.clone())
                    .collect();
                let mut divided = false;
                for n in nums {
                    if let Some(q) = n.0.div_exact(&d.0) {
                        bump(&mut self.factors, &n, -1);
                        bump(&mut self.factors, &d, 1);
                        let cofactor = ExactScalar::from_poly(&q);
                        *self = self.mul(&cofactor);
                        divided = true;
                        break;
                    }
                }
                if !divided {
                    break;
                }
            }
        }
    }

    pub fn dualize(&self) -> Self {
        let mut out = ExactScalar {
            coeff: self.coeff.clone(),
            unit: self.unit.inv(),
            factors: BTreeMap::new(),
        };
        for (a, &e) in &self.factors {
            let (c, u, atom) = normalize(&a.0.dualize());
            // c = ±1: atoms have unit content.
            if c.is_negative() && e % 2 != 0 {
                out.coeff = -out.coeff;
            }
            out.unit = out.unit * u.pow(e);
            if let Some(atom) = atom {
                bump(&mut out.factors, &atom, e);
            }
        }
        out
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        if base.is_zero() {
            return Ok(if e == 0 { Self::one() } else { Self::zero() });
        }
        let k = e.unsigned_abs();
        Ok(ExactScalar {
            coeff: num_traits::pow::Pow::pow(&base.coeff, k),
            unit: base.unit.pow(k as i32),
            factors: base.factors.iter().map(|(a, &x)| (a.clone(), x * k as i32)).collect(),
        })
    }

    /// Expanded numerator (including the Laurent unit) with integer coefficients.
    pub fn numerator(&self) -> LaurentPoly {
        if self.is_zero() {
            return LaurentPoly::zero();
        }
        let mut acc = LaurentPoly::monomial(self.unit, self.coeff.numer().clone());
        for (a, &e) in &self.factors {
            if e > 0 {
                acc = acc.mul(&a.0.pow(e as u32));
            }
        }
        acc
    }

    /// Expanded denominator with integer coefficients.
    pub fn denominator(&self) -> LaurentPoly {
        let mut acc = LaurentPoly::constant(self.coeff.denom().clone());
        for (a, &e) in &self.factors {
            if e < 0 {
                acc = acc.mul(&a.0.pow((-e) as u32));
            }
        }
        acc
    }

    /// Number of distinct polynomial factors (diagnostics).
    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    /// Complex value at `point` (α, β, γ₁ … in variable order).
    pub fn evaluate_at(&self, point: &[Complex64], eps: f64) -> Result<Complex64> {
        if self.is_zero() {
            return Ok(Complex64::zero());
        }
        let c = num_traits::ToPrimitive::to_f64(&self.coeff).unwrap_or(f64::NAN);
        let mut num = self.unit.evaluate(point) * c;
        let mut den = Complex64::one();
        for (a, &e) in &self.factors {
            let v = a.0.evaluate(point);
            if e > 0 {
                num *= v.powi(e);
            } else {
                den *= v.powi(-e);
            }
        }
        let scale = den_scale(self, point);
        if den.norm() <= eps * scale {
            return Err(Error::DenominatorVanishes(format!("|denominator| = {:e}", den.norm())));
        }
        Ok(num / den)
    }

    /// Exact value at a rational point; `None` when the denominator vanishes.
    pub fn evaluate_rational(&self, point: &[BigRational]) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        let mut acc = self.coeff.clone() * self.unit.evaluate_rational(point);
        for (a, &e) in &self.factors {
            let v = a.0.evaluate_rational(point);
            if e < 0 && v.is_zero() {
                return None;
            }
            acc *= num_traits::pow::Pow::pow(&v, e);
        }
        Some(acc)
    }

    /// Number of variables referenced (for formatting).
    pub fn num_vars_used(&self) -> usize {
        let unit_vars = LaurentPoly::monomial(self.unit, BigInt::one()).num_vars_used();
        self.factors
            .keys()
            .map(|a| a.0.num_vars_used())
            .chain(std::iter::once(unit_vars))
            .max()
            .unwrap_or(0)
    }
}

/// Sum of |coefficient| over denominator terms, a scale for the
/// vanishing test.
fn den_scale(s: &ExactScalar, point: &[Complex64]) -> f64 {
    let mut scale = 1.0;
    for (a, &e) in &s.factors {
        if e < 0 {
            let mag: f64 =
                a.0.terms()
                    .iter()
                    .map(|(m, c)| m.evaluate(point).norm() * num_traits::ToPrimitive::to_f64(c).unwrap_or(1.0).abs())
                    .sum();
            scale *= mag.powi(-e);
        }
    }
    scale
}

fn bump(map: &mut BTreeMap<Atom, i32>, atom: &Atom, delta: i32) {
    let e = map.entry(atom.clone()).or_insert(0);
    *e += delta;
    if *e == 0 {
        map.remove(atom);
    }
}

impl PartialEq for ExactScalar {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExactScalar")
            .field("coeff", &self.coeff.to_string())
            .field("unit", &self.unit)
            .field("factors", &self.factors)
            .finish()
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::text::format_exact(self))
    }
}

impl Scalar for ExactScalar {
    const EXACT: bool = true;

    fn zero() -> Self {
        ExactScalar::zero()
    }
    fn one() -> Self {
        ExactScalar::one()
    }
    fn from_int(n: i64) -> Self {
        ExactScalar::from_int(n)
    }
    fn add(&self, rhs: &Self) -> Self {
        ExactScalar::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        ExactScalar::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        ExactScalar::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        ExactScalar::neg(self)
    }
    fn try_div(&self, rhs: &Self, _tol: f64) -> Result<Self> {
        self.checked_div(rhs)
    }
    fn dualize(&self) -> Self {
        ExactScalar::dualize(self)
    }
    fn is_zero(&self) -> bool {
        ExactScalar::is_zero(self)
    }
    fn residual(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn determinant(m: &SquareMatrix<Self>) -> Self {
        exact_linalg::determinant(m)
    }
    fn inverse(m: &SquareMatrix<Self>) -> Result<SquareMatrix<Self>> {
        exact_linalg::inverse(m)
    }
    fn rank(rows: usize, cols: usize, entries: &[Self], _tol: f64) -> Result<usize> {
        Ok(exact_linalg::rank(rows, cols, entries))
    }
    fn powi(&self, e: i32, _tol: f64) -> Result<Self> {
        self.pow(e)
    }
}

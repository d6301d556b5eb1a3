//! Sparse multivariate Laurent polynomials with integer coefficients.
//!
//! Terms are kept sorted by exponent vector in descending lexicographic
//! order with no zero coefficients, so structural equality is polynomial
//! equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Div, Mul};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;

/// Maximum number of variables (α, β, γ₁ … γ₆).
pub const MAX_VARS: usize = 8;

/// A Laurent monomial: one signed exponent per variable.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial([i8; MAX_VARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; MAX_VARS]);

    pub fn var(index: usize, exp: i32) -> Self {
        let mut e = [0i8; MAX_VARS];
        e[index] = narrow(exp);
        Monomial(e)
    }

    pub fn from_exponents(exps: &[i32]) -> Self {
        assert!(exps.len() <= MAX_VARS, "too many variables");
        let mut e = [0i8; MAX_VARS];
        for (slot, &x) in e.iter_mut().zip(exps) {
            *slot = narrow(x);
        }
        Monomial(e)
    }

    pub fn exponent(&self, index: usize) -> i32 {
        self.0[index] as i32
    }

    pub fn exponents(&self) -> [i32; MAX_VARS] {
        self.0.map(i32::from)
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0; MAX_VARS]
    }

    pub fn inv(self) -> Monomial {
        Monomial(self.0.map(|x| x.checked_neg().expect("Laurent exponent overflow")))
    }

    pub fn pow(self, k: i32) -> Monomial {
        Monomial(self.0.map(|x| narrow(x as i32 * k)))
    }

    /// Componentwise minimum.
    pub fn meet(self, other: Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a = (*a).min(b);
        }
        Monomial(e)
    }

    /// Componentwise maximum.
    pub fn join(self, other: Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a = (*a).max(b);
        }
        Monomial(e)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }

    /// True when every exponent of `self` is at most the matching one of `other`.
    pub fn le_componentwise(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::one();
        for (i, &e) in self.0.iter().enumerate() {
            if e != 0 {
                acc *= point[i].powi(e as i32);
            }
        }
        acc
    }

    pub fn evaluate_rational(&self, point: &[BigRational]) -> BigRational {
        let mut acc = BigRational::one();
        for (i, &e) in self.0.iter().enumerate() {
            if e != 0 {
                acc *= num_traits::pow::Pow::pow(&point[i], e as i32);
            }
        }
        acc
    }
}

fn narrow(x: i32) -> i8 {
    i8::try_from(x).expect("Laurent exponent out of range")
}

impl Mul for Monomial {
    type Output = Monomial;

    fn mul(self, other: Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a = a.checked_add(b).expect("Laurent exponent overflow");
        }
        Monomial(e)
    }
}

impl Div for Monomial {
    type Output = Monomial;

    fn div(self, other: Monomial) -> Monomial {
        Monomial::mul(self, other.inv())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Integer-coefficient Laurent polynomial.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LaurentPoly {
    terms: Vec<(Monomial, BigInt)>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::monomial(Monomial::ONE, c)
    }

    pub fn monomial(m: Monomial, c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            LaurentPoly { terms: vec![(m, c)] }
        }
    }

    pub fn var(index: usize) -> Self {
        Self::monomial(Monomial::var(index, 1), BigInt::one())
    }

    /// Collects terms, merging duplicates and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, BigInt)>>(terms: I) -> Self {
        let mut map: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (m, c) in terms {
            *map.entry(m).or_default() += c;
        }
        Self::from_map(map)
    }

    fn from_map(map: BTreeMap<Monomial, BigInt>) -> Self {
        let terms = map.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect();
        LaurentPoly { terms }
    }

    fn from_unsorted(mut terms: Vec<(Monomial, BigInt)>) -> Self {
        terms.retain(|(_, c)| !c.is_zero());
        terms.sort_unstable_by_key(|t| std::cmp::Reverse(t.0));
        LaurentPoly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, BigInt)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Leading term in lexicographic order.
    pub fn lead(&self) -> Option<&(Monomial, BigInt)> {
        self.terms.first()
    }

    /// Componentwise minimum exponent over all terms.
    pub fn min_exponents(&self) -> Monomial {
        let mut it = self.terms.iter().map(|(m, _)| *m);
        match it.next() {
            Some(first) => it.fold(first, Monomial::meet),
            None => Monomial::ONE,
        }
    }

    pub fn max_exponents(&self) -> Monomial {
        let mut it = self.terms.iter().map(|(m, _)| *m);
        match it.next() {
            Some(first) => it.fold(first, Monomial::join),
            None => Monomial::ONE,
        }
    }

    /// gcd of the coefficients, signed like the leading coefficient.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        match self.lead() {
            Some((_, c)) if c.is_negative() => -g,
            _ => g,
        }
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        LaurentPoly { terms: out }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
        }
    }

    /// Multiplication by a monomial preserves term order.
    pub fn shift(&self, m: Monomial) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(x, c)| (x.mul(m), c.clone())).collect(),
        }
    }

    /// Exact division of every coefficient by `k`.
    pub fn div_scalar_exact(&self, k: &BigInt) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let (q, r) = c.div_rem(k);
                    debug_assert!(r.is_zero());
                    (*m, q)
                })
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.shift(*m).scale(c);
        }
        if other.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.shift(*m).scale(c);
        }
        if let Some(p) = self.mul_small(other) {
            return p;
        }
        let mut acc: FxHashMap<Monomial, BigInt> = FxHashMap::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.mul(*mb)).or_default() += ca * cb;
            }
        }
        Self::from_unsorted(acc.into_iter().collect())
    }

    /// Machine-word fast path; `None` when a coefficient or partial sum
    /// leaves the i64/i128 range.
    fn mul_small(&self, other: &Self) -> Option<Self> {
        let a: Vec<(Monomial, i64)> = self
            .terms
            .iter()
            .map(|(m, c)| c.to_i64().map(|c| (*m, c)))
            .collect::<Option<_>>()?;
        let b: Vec<(Monomial, i64)> = other
            .terms
            .iter()
            .map(|(m, c)| c.to_i64().map(|c| (*m, c)))
            .collect::<Option<_>>()?;
        let mut acc: FxHashMap<Monomial, i128> =
            FxHashMap::with_capacity_and_hasher(a.len() * b.len() / 2 + 1, Default::default());
        for (ma, ca) in &a {
            for (mb, cb) in &b {
                let slot = acc.entry(ma.mul(*mb)).or_insert(0);
                *slot = slot.checked_add(*ca as i128 * *cb as i128)?;
            }
        }
        Some(Self::from_unsorted(
            acc.into_iter().map(|(m, c)| (m, BigInt::from(c))).collect(),
        ))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exponent negation: the substitution x ↦ x⁻¹ in every variable.
    pub fn dualize(&self) -> Self {
        Self::from_unsorted(self.terms.iter().map(|(m, c)| (m.inv(), c.clone())).collect())
    }

    /// Exact quotient in ℤ[x^±], or `None` when `divisor` does not divide.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if divisor.len() == 1 {
            let (m, c) = &divisor.terms[0];
            let mut terms = Vec::with_capacity(self.len());
            for (x, d) in &self.terms {
                let (q, r) = d.div_rem(c);
                if !r.is_zero() {
                    return None;
                }
                terms.push((x.div(*m), q));
            }
            return Some(LaurentPoly { terms });
        }
        // Shift both to genuine polynomials; the quotient is then a polynomial too.
        let shift_n = self.min_exponents();
        let shift_d = divisor.min_exponents();
        let num = self.shift(shift_n.inv());
        let den = divisor.shift(shift_d.inv());
        let deg_n = num.max_exponents();
        let deg_d = den.max_exponents();
        if !deg_d.le_componentwise(&deg_n) {
            return None;
        }
        let bound = deg_n.div(deg_d);
        let (lead_m, lead_c) = den.terms[0].clone();
        let mut rem: BTreeMap<Monomial, BigInt> = num.terms.into_iter().collect();
        let mut quot = Vec::new();
        while let Some((&rm, rc)) = rem.iter().next_back() {
            let qm = rm.div(lead_m);
            if !qm.is_nonnegative() || !qm.le_componentwise(&bound) {
                return None;
            }
            let (qc, r) = rc.div_rem(&lead_c);
            if !r.is_zero() {
                return None;
            }
            for (dm, dc) in &den.terms {
                let key = dm.mul(qm);
                let delta = &qc * dc;
                match rem.entry(key) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() -= delta;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(-delta);
                    }
                }
            }
            quot.push((qm, qc));
        }
        let q = LaurentPoly { terms: quot };
        Some(q.shift(shift_n.div(shift_d)))
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Complex64 {
        self.terms.iter().fold(Complex64::zero(), |acc, (m, c)| {
            acc + m.evaluate(point) * c.to_f64().unwrap_or(f64::NAN)
        })
    }

    pub fn evaluate_rational(&self, point: &[BigRational]) -> BigRational {
        self.terms.iter().fold(BigRational::zero(), |acc, (m, c)| {
            acc + m.evaluate_rational(point) * BigRational::from_integer(c.clone())
        })
    }

    /// Highest variable index with a nonzero exponent, plus one.
    pub fn num_vars_used(&self) -> usize {
        self.terms
            .iter()
            .map(|(m, _)| m.exponents().iter().rposition(|&e| e != 0).map_or(0, |p| p + 1))
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.terms.iter().map(|(m, c)| (m, c.to_string())))
            .finish()
    }
}

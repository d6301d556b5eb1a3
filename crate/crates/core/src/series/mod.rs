//! Truncated F_C series, the local solutions F_I and their PDE residuals.
//!
//! Truncation is by total degree: a table of order N holds every
//! coefficient A_n with |n| = n₁ + … + nₘ ≤ N.

mod gamma;

pub use gamma::{complex_gamma, reciprocal_gamma};

use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::classify::shifted_parameters;
use crate::error::{Error, Result};
use crate::indexing::BinaryIndex;
use crate::params::{Param, ParameterPoint};
use crate::scalars::DEFAULT_TOL;

use twofloat::TwoFloat;

/// Double-double complex scalar used by the numeric coefficient path.
pub type Wide = Complex<TwoFloat>;

/// Field operations used by the coefficient recurrence.
pub trait Coefficient: Clone + Num + FromPrimitive {
    fn quotient(self, rhs: Self) -> Self {
        self / rhs
    }
}

impl Coefficient for Complex64 {}
impl Coefficient for BigRational {}

impl Coefficient for Wide {
    fn quotient(self, rhs: Self) -> Self {
        let d = rhs.norm_sqr();
        self * rhs.conj() * Complex::new(reciprocal(d), TwoFloat::from(0.0))
    }
}

/// 1/d to full double-double precision: `TwoFloat` division plus one Newton
/// step.
fn reciprocal(d: TwoFloat) -> TwoFloat {
    let one = TwoFloat::from(1.0);
    let r = one / d;
    r + r * (one - d * r)
}

pub fn widen(z: Complex64) -> Wide {
    Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

pub fn narrow(z: &Wide) -> Complex64 {
    Complex64::new(f64::from(z.re), f64::from(z.im))
}

/// The base point (1/(2m²), …, 1/(2m²)).
pub fn base_point(m: usize) -> Vec<Complex64> {
    vec![Complex64::new(1.0 / (2.0 * (m * m) as f64), 0.0); m]
}

/// Σ √|xₖ| < 1.
pub fn in_domain(x: &[Complex64]) -> bool {
    x.iter().map(|z| z.norm().sqrt()).sum::<f64>() < 1.0
}

/// ∏ xₖ · R(x), R(x) = ∏_{ε ∈ {±1}^m} (1 + Σ εₖ √xₖ) with principal roots.
pub fn singular_locus_value(x: &[Complex64]) -> Complex64 {
    let roots: Vec<Complex64> = x.iter().map(|z| z.sqrt()).collect();
    let m = x.len();
    let mut r = Complex64::new(1.0, 0.0);
    for signs in 0..1usize << m {
        let mut f = Complex64::new(1.0, 0.0);
        for (k, s) in roots.iter().enumerate() {
            if signs >> k & 1 == 1 {
                f -= s;
            } else {
                f += s;
            }
        }
        r *= f;
    }
    x.iter().fold(r, |acc, z| acc * z)
}

/// Coefficients A_n of F_C(a, b, c; x) for |n| ≤ N, stored densely with
/// stride N + 1 per variable.
#[derive(Clone, Debug)]
pub struct CoefficientTable<T> {
    m: usize,
    order: usize,
    values: Vec<T>,
}

impl<T: Coefficient> CoefficientTable<T> {
    /// Builds the table by ascending products:
    /// A_n = A_{n−eₖ} · (a+|n|−1)(b+|n|−1) / ((cₖ+nₖ−1)·nₖ).
    pub fn build(a: &T, b: &T, c: &[T], order: usize) -> Result<Self> {
        let m = c.len();
        if m == 0 {
            return Err(Error::InvalidArgument("need m >= 1".into()));
        }
        let stride = order + 1;
        let size = stride
            .checked_pow(m as u32)
            .filter(|&s| s <= 1 << 26)
            .ok_or_else(|| Error::InvalidArgument(format!("table for m = {m}, N = {order} is too large")))?;
        let mut values = vec![T::zero(); size];
        values[0] = T::one();
        let num = |k: usize| T::from_usize(k).expect("small integer");
        let mut digits = vec![0usize; m];
        for pos in 1..size {
            increment(&mut digits, stride);
            let total: usize = digits.iter().sum();
            if total > order {
                continue;
            }
            let k = digits.iter().position(|&d| d > 0).expect("pos > 0");
            let nk = digits[k];
            let den = (c[k].clone() + num(nk) - T::one()) * num(nk);
            if den.is_zero() {
                return Err(Error::PochhammerPole { k: k + 1, n: nk - 1 });
            }
            let prev = values[pos - pow(stride, k)].clone();
            let top = (a.clone() + num(total) - T::one()) * (b.clone() + num(total) - T::one());
            values[pos] = (prev * top).quotient(den);
        }
        Ok(CoefficientTable { m, order, values })
    }
}

fn increment(digits: &mut [usize], stride: usize) {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < stride {
            return;
        }
        *d = 0;
    }
}

fn pow(stride: usize, k: usize) -> usize {
    stride.pow(k as u32)
}

impl<T: Clone> CoefficientTable<T> {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// A_n; `None` outside the truncation.
    pub fn get(&self, n: &[usize]) -> Option<&T> {
        if n.len() != self.m || n.iter().sum::<usize>() > self.order {
            return None;
        }
        let stride = self.order + 1;
        let pos = n.iter().rev().fold(0, |acc, &d| acc * stride + d);
        Some(&self.values[pos])
    }

    /// All (n, A_n) with |n| ≤ N, in storage order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, &T)> + '_ {
        let stride = self.order + 1;
        let m = self.m;
        let order = self.order;
        self.values.iter().enumerate().filter_map(move |(pos, v)| {
            let mut n = Vec::with_capacity(m);
            let mut p = pos;
            for _ in 0..m {
                n.push(p % stride);
                p /= stride;
            }
            (n.iter().sum::<usize>() <= order).then_some((n, v))
        })
    }
}

impl CoefficientTable<Wide> {
    /// Σ A_n xⁿ and the heuristic tail Σ_{|n|=N} |A_n xⁿ|, summed in double-double
    /// and rounded at the end.
    pub fn evaluate(&self, x: &[Complex64]) -> Result<(Complex64, f64)> {
        if x.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for m = {}",
                x.len(),
                self.m
            )));
        }
        let powers: Vec<Vec<Wide>> = x
            .iter()
            .map(|&z| {
                let z = widen(z);
                let mut v = vec![Wide::one()];
                for _ in 0..self.order {
                    let last = *v.last().expect("nonempty");
                    v.push(last * z);
                }
                v
            })
            .collect();
        let mut sum = Wide::zero();
        let mut tail = 0.0;
        for (n, a) in self.entries() {
            let mut t = *a;
            for (k, &nk) in n.iter().enumerate() {
                t *= powers[k][nk];
            }
            sum += t;
            if n.iter().sum::<usize>() == self.order {
                tail += narrow(&t).norm();
            }
        }
        Ok((narrow(&sum), tail))
    }
}

/// Value of a truncated series at a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: Complex64,
    pub order: usize,
    /// Magnitude of the last shell |n| = N; a heuristic, not a bound.
    pub tail: f64,
}

fn check_pochhammer(c: &[Param], order: usize) -> Result<()> {
    for (k, ck) in c.iter().enumerate() {
        if let Some(v) = ck.integer_value(DEFAULT_TOL) {
            if v <= 0 && ((-v) as usize) < order {
                return Err(Error::PochhammerPole {
                    k: k + 1,
                    n: (-v) as usize,
                });
            }
        }
    }
    Ok(())
}

/// F_C(a, b, c; x) truncated at total degree N.
pub fn fc_series(a: &Param, b: &Param, c: &[Param], x: &[Complex64], order: usize) -> Result<SeriesValue> {
    check_pochhammer(c, order)?;
    let cc: Vec<Wide> = c.iter().map(wide_param).collect();
    let table = CoefficientTable::build(&wide_param(a), &wide_param(b), &cc, order)?;
    let (value, tail) = table.evaluate(x)?;
    Ok(SeriesValue { value, order, tail })
}

/// Exponents iₖ(1 − cₖ) of the prefactor ∏ xₖ^{iₖ(1−cₖ)} of F_I.
pub fn prefactor_exponents(p: &ParameterPoint, index: &BinaryIndex) -> Vec<Param> {
    (1..=p.m())
        .map(|k| {
            if index.bit(k) == 1 {
                Param::int(1) - p.c(k)
            } else {
                Param::int(0)
            }
        })
        .collect()
}

/// F_I(x) = ∏Γ((−1)^{iₖ}(1−cₖ)) / (Γ(1−a^I)Γ(1−b^I)) · ∏ xₖ^{iₖ(1−cₖ)} · F_C(a^I, b^I, c^I; x),
/// with principal-branch powers.
pub fn solution_f_i(p: &ParameterPoint, index: &BinaryIndex, x: &[Complex64], order: usize) -> Result<SeriesValue> {
    let (ai, bi, ci) = shifted_parameters(p, index)?;
    let one = Complex64::new(1.0, 0.0);
    let mut prefactor = one;
    for k in 1..=p.m() {
        let s = one - p.c(k).to_complex();
        let arg = if index.bit(k) == 1 { -s } else { s };
        prefactor *= complex_gamma(arg)?;
    }
    prefactor /= complex_gamma(one - ai.to_complex())? * complex_gamma(one - bi.to_complex())?;
    for (z, e) in x.iter().zip(prefactor_exponents(p, index)) {
        if !e.is_zero() {
            prefactor *= (z.ln() * e.to_complex()).exp();
        }
    }
    let s = fc_series(&ai, &bi, &ci, x, order)?;
    Ok(SeriesValue {
        value: prefactor * s.value,
        order,
        tail: prefactor.norm() * s.tail,
    })
}

/// Result of applying the m operators θₖ(θₖ+cₖ−1) − xₖ(θ+a)(θ+b) to a
/// truncated F_I.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdeResidual {
    /// True when computed over exact rationals; the residual is then exact.
    pub exact: bool,
    /// Largest residual coefficient of total degree ≤ N.
    pub max_abs: f64,
    /// `max_abs` divided by the largest term magnitude entering the residual.
    pub max_relative: f64,
}

/// Residual of the truncated x^s·F_C(a^I, b^I, c^I; x), s = (iₖ(1−cₖ)).
///
/// The coefficient of x^{s+n} in operator k is
/// (nₖ+sₖ)(nₖ+sₖ+cₖ−1)A_n − (|n|−1+|s|+a)(|n|−1+|s|+b)A_{n−eₖ}; every such
/// coefficient with |n| ≤ N must vanish. Degree N+1 spillover is excluded.
/// Exact parameters use rational arithmetic unless `force_numeric` is set;
/// otherwise the double-double table that [`fc_series`] evaluates is used.
pub fn pde_residual(p: &ParameterPoint, index: &BinaryIndex, order: usize, force_numeric: bool) -> Result<PdeResidual> {
    let (_, _, ci) = shifted_parameters(p, index)?;
    check_pochhammer(&ci, order + 1)?;
    let (exact, r) = if p.is_exact() && !force_numeric {
        let q = |x: &Param| {
            let r = x.as_rational().expect("exact");
            BigRational::new((*r.numer()).into(), (*r.denom()).into())
        };
        let c: Vec<BigRational> = p.c.iter().map(q).collect();
        let r = shifted_residual(&q(&p.a), &q(&p.b), &c, index, order, |x: &BigRational| {
            x.abs().to_f64().unwrap_or(f64::INFINITY)
        })?;
        (true, r)
    } else {
        let c: Vec<Wide> = p.c.iter().map(wide_param).collect();
        let r = shifted_residual(&wide_param(&p.a), &wide_param(&p.b), &c, index, order, |x: &Wide| {
            narrow(x).norm()
        })?;
        (false, r)
    };
    Ok(PdeResidual {
        exact,
        max_abs: r.0,
        max_relative: if r.1 > 0.0 { r.0 / r.1 } else { r.0 },
    })
}

/// Parameter as a double-double; rationals are divided in double-double.
pub fn wide_param(x: &Param) -> Wide {
    match x {
        Param::Rational(r) => Complex::new(
            TwoFloat::from(*r.numer() as f64) * reciprocal(TwoFloat::from(*r.denom() as f64)),
            TwoFloat::from(0.0),
        ),
        Param::Complex(z) => widen(*z),
    }
}

/// Shifts (a, b, c) by `index`, builds the table and applies the unshifted
/// operators, all in `T`.
fn shifted_residual<T: Coefficient>(
    a: &T,
    b: &T,
    c: &[T],
    index: &BinaryIndex,
    order: usize,
    norm: impl Fn(&T) -> f64,
) -> Result<(f64, f64)> {
    let s: Vec<T> = c
        .iter()
        .enumerate()
        .map(|(k, ck)| {
            if index.bit(k + 1) == 1 {
                T::one() - ck.clone()
            } else {
                T::zero()
            }
        })
        .collect();
    let shift = s.iter().fold(T::zero(), |acc, x| acc + x.clone());
    let ci: Vec<T> = c
        .iter()
        .zip(&s)
        .map(|(ck, sk)| ck.clone() + sk.clone() + sk.clone())
        .collect();
    let table = CoefficientTable::build(&(a.clone() + shift.clone()), &(b.clone() + shift), &ci, order)?;
    Ok(residual_generic(&table, a, b, c, &s, norm))
}

/// (max |residual|, max term magnitude).
fn residual_generic<T: Clone + Num + FromPrimitive>(
    table: &CoefficientTable<T>,
    a: &T,
    b: &T,
    c: &[T],
    s: &[T],
    norm: impl Fn(&T) -> f64,
) -> (f64, f64) {
    let num = |k: usize| T::from_usize(k).expect("small integer");
    let s_total = s.iter().fold(T::zero(), |acc, x| acc + x.clone());
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for (n, an) in table.entries() {
        let total = n.iter().sum::<usize>();
        for k in 0..table.m() {
            let t = num(n[k]) + s[k].clone();
            let first = t.clone() * (t + c[k].clone() - T::one()) * an.clone();
            let second = if n[k] == 0 {
                T::zero()
            } else {
                let mut prev = n.clone();
                prev[k] -= 1;
                let base = num(total) - T::one() + s_total.clone();
                let prev_a = table.get(&prev).expect("inside truncation").clone();
                (base.clone() + a.clone()) * (base + b.clone()) * prev_a
            };
            scale = scale.max(norm(&first)).max(norm(&second));
            worst = worst.max(norm(&(first - second)));
        }
    }
    (worst, scale)
}

//! Concrete parameter tuples (a, b, c₁ … cₘ) and their exponentials.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::indexing::BinaryIndex;

/// A parameter value: an exact rational, or a complex number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Param {
    Rational(Rational64),
    Complex(Complex64),
}

impl Param {
    pub fn rational(numer: i64, denom: i64) -> Self {
        Param::Rational(Rational64::new(numer, denom))
    }

    pub fn int(n: i64) -> Self {
        Param::Rational(Rational64::from_integer(n))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Param::Rational(_))
    }

    pub fn as_rational(&self) -> Option<Rational64> {
        match self {
            Param::Rational(q) => Some(*q),
            Param::Complex(_) => None,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Param::Rational(q) => Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0),
            Param::Complex(z) => *z,
        }
    }

    /// exp(2πi·self). Rationals are reduced mod 1 first so the angle is exact
    /// to rounding.
    pub fn exp_2pi_i(&self) -> Complex64 {
        match self {
            Param::Rational(q) => {
                let (n, d) = (*q.numer(), *q.denom());
                let r = n.mod_floor(&d);
                // Hit the exact values on the real and imaginary axes.
                match (4 * r).div_rem(&d) {
                    (k, 0) => match k {
                        0 => Complex64::new(1.0, 0.0),
                        1 => Complex64::new(0.0, 1.0),
                        2 => Complex64::new(-1.0, 0.0),
                        _ => Complex64::new(0.0, -1.0),
                    },
                    _ => Complex64::from_polar(1.0, 2.0 * PI * r as f64 / d as f64),
                }
            }
            Param::Complex(z) => (Complex64::new(0.0, 2.0 * PI) * z).exp(),
        }
    }

    /// The integer this value equals: exactly for rationals, within `tol`
    /// (real part to ℤ, imaginary part to 0) for complex values.
    pub fn integer_value(&self, tol: f64) -> Option<i64> {
        match self {
            Param::Rational(q) => q.is_integer().then(|| q.to_integer()),
            Param::Complex(z) => {
                let r = z.re.round();
                ((z.re - r).abs() < tol && z.im.abs() < tol).then_some(r as i64)
            }
        }
    }

    /// Distance to the nearest integer (complex: includes |Im|).
    pub fn distance_to_integer(&self) -> f64 {
        match self {
            Param::Rational(q) => {
                let frac = q.fract().abs().to_f64().unwrap_or(f64::NAN);
                frac.min(1.0 - frac)
            }
            Param::Complex(z) => (z.re - z.re.round()).hypot(z.im),
        }
    }

    /// True for 0, −1, −2, ….
    pub fn is_nonpositive_integer(&self, tol: f64) -> bool {
        self.integer_value(tol).is_some_and(|n| n <= 0)
    }
}

impl Add for Param {
    type Output = Param;
    fn add(self, rhs: Param) -> Param {
        match (self, rhs) {
            (Param::Rational(a), Param::Rational(b)) => Param::Rational(a + b),
            (a, b) => Param::Complex(a.to_complex() + b.to_complex()),
        }
    }
}

impl Neg for Param {
    type Output = Param;
    fn neg(self) -> Param {
        match self {
            Param::Rational(a) => Param::Rational(-a),
            Param::Complex(z) => Param::Complex(-z),
        }
    }
}

impl Sub for Param {
    type Output = Param;
    fn sub(self, rhs: Param) -> Param {
        self + (-rhs)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Rational(q) => write!(f, "{q}"),
            Param::Complex(z) if z.im == 0.0 => write!(f, "{}", crate::scalars::text::format_f64(z.re)),
            Param::Complex(z) => f.write_str(&crate::scalars::text::format_complex(*z)),
        }
    }
}

impl FromStr for Param {
    type Err = Error;

    /// `p/q` or an integer gives an exact rational; a decimal gives a real
    /// value; `re±imi` gives a complex value.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: i64 = n
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator in {t:?}")))?;
            let d: i64 = d
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in {t:?}")))?;
            if d == 0 {
                return Err(Error::Parse(format!("zero denominator in {t:?}")));
            }
            return Ok(Param::rational(n, d));
        }
        if let Ok(n) = t.parse::<i64>() {
            return Ok(Param::int(n));
        }
        if let Ok(x) = t.parse::<f64>() {
            return Ok(Param::Complex(Complex64::new(x, 0.0)));
        }
        if t.ends_with('i') {
            return crate::scalars::text::parse_complex(t).map(Param::Complex);
        }
        Err(Error::Parse(format!("cannot parse parameter {t:?}")))
    }
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Param {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// (a, b, c₁ … cₘ) with α = e^{2πia}, β = e^{2πib}, γₖ = e^{2πicₖ}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterPoint {
    pub a: Param,
    pub b: Param,
    pub c: Vec<Param>,
}

impl ParameterPoint {
    pub fn new(a: Param, b: Param, c: Vec<Param>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::InvalidArgument("need m >= 1 values of c".into()));
        }
        if c.len() > BinaryIndex::MAX_M {
            return Err(Error::InvalidArgument(format!("m = {} is too large", c.len())));
        }
        Ok(ParameterPoint { a, b, c })
    }

    /// Parses `a`, `b` and each `c_k` with [`Param::from_str`].
    pub fn parse(a: &str, b: &str, c: &[&str]) -> Result<Self> {
        Self::new(
            a.parse()?,
            b.parse()?,
            c.iter().map(|s| s.parse()).collect::<Result<_>>()?,
        )
    }

    pub fn m(&self) -> usize {
        self.c.len()
    }

    pub fn is_exact(&self) -> bool {
        self.a.is_exact() && self.b.is_exact() && self.c.iter().all(Param::is_exact)
    }

    pub fn alpha(&self) -> Complex64 {
        self.a.exp_2pi_i()
    }

    pub fn beta(&self) -> Complex64 {
        self.b.exp_2pi_i()
    }

    /// γₖ for 1 ≤ k ≤ m.
    pub fn gamma(&self, k: usize) -> Complex64 {
        self.c[k - 1].exp_2pi_i()
    }

    /// cₖ for 1 ≤ k ≤ m.
    pub fn c(&self, k: usize) -> Param {
        self.c[k - 1]
    }

    /// The exponent ℓ with λ = e^{2πiℓ}: ℓ = (m−1)/2 − a − b + Σ cₖ.
    pub fn lambda_exponent(&self) -> Param {
        let half = Param::rational(self.m() as i64 - 1, 2);
        self.c.iter().fold(half - self.a - self.b, |acc, &c| acc + c)
    }

    /// λ = (−1)^{m−1} α⁻¹ β⁻¹ ∏ γₖ.
    pub fn lambda(&self) -> Complex64 {
        self.lambda_exponent().exp_2pi_i()
    }

    /// Point for the exact generators, in variable order (α, β, γ₁, …).
    pub fn exponentials(&self) -> Vec<Complex64> {
        let mut v = vec![self.alpha(), self.beta()];
        v.extend((1..=self.m()).map(|k| self.gamma(k)));
        v
    }

    /// Σ iₖ (1 − cₖ), the exponent shift attached to I.
    pub fn index_shift(&self, index: &BinaryIndex) -> Param {
        (1..=self.m())
            .filter(|&k| index.bit(k) == 1)
            .fold(Param::int(0), |acc, k| acc + Param::int(1) - self.c(k))
    }
}

impl Zero for Param {
    fn zero() -> Self {
        Param::int(0)
    }
    fn is_zero(&self) -> bool {
        match self {
            Param::Rational(q) => q.is_zero(),
            Param::Complex(z) => z.is_zero(),
        }
    }
}

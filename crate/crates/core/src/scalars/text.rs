//! Canonical text forms.
//!
//! Exact scalars print as `(num)/(den)`. Each polynomial is a `" + "`-joined
//! list of terms in descending lexicographic exponent order; a term is an
//! integer coefficient followed by `*var^exp` for every variable with a
//! nonzero exponent. Variables are `a`, `b`, `g1`, `g2`, …. The zero
//! polynomial prints as `0`.
//!
//! Complex numbers print as `{re:+.16e}{im:+.16e}i` (17 significant digits).

use num_bigint::BigInt;
use num_complex::Complex64;

use super::exact::ExactScalar;
use super::poly::{LaurentPoly, Monomial, MAX_VARS};
use crate::error::{Error, Result};

pub fn var_name(i: usize) -> String {
    match i {
        0 => "a".to_string(),
        1 => "b".to_string(),
        k => format!("g{}", k - 1),
    }
}

fn var_index(name: &str) -> Option<usize> {
    match name {
        "a" => Some(0),
        "b" => Some(1),
        _ => {
            let k: usize = name.strip_prefix('g')?.parse().ok()?;
            (k >= 1 && k + 1 < MAX_VARS).then_some(k + 1)
        }
    }
}

pub fn format_poly(p: &LaurentPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let terms: Vec<String> = p
        .terms()
        .iter()
        .map(|(m, c)| {
            let mut s = c.to_string();
            for (i, e) in m.exponents().iter().enumerate() {
                if *e != 0 {
                    s.push_str(&format!("*{}^{}", var_name(i), e));
                }
            }
            s
        })
        .collect();
    terms.join(" + ")
}

pub fn format_exact(s: &ExactScalar) -> String {
    format!("({})/({})", format_poly(&s.numerator()), format_poly(&s.denominator()))
}

pub fn parse_poly(text: &str) -> Result<LaurentPoly> {
    let text = text.trim();
    if text == "0" {
        return Ok(LaurentPoly::zero());
    }
    let mut terms = Vec::new();
    for term in text.split(" + ") {
        let mut parts = term.trim().split('*');
        let coeff: BigInt = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("empty term in {text:?}")))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad coefficient in {term:?}")))?;
        let mut exps = [0i32; MAX_VARS];
        for factor in parts {
            let (name, exp) = factor
                .split_once('^')
                .ok_or_else(|| Error::Parse(format!("expected var^exp, got {factor:?}")))?;
            let i = var_index(name).ok_or_else(|| Error::Parse(format!("unknown variable {name:?}")))?;
            exps[i] += exp
                .parse::<i32>()
                .map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?;
        }
        terms.push((Monomial::from_exponents(&exps), coeff));
    }
    Ok(LaurentPoly::from_terms(terms))
}

pub fn parse_exact(text: &str) -> Result<ExactScalar> {
    let text = text.trim();
    let (num, den) = text
        .split_once(")/(")
        .ok_or_else(|| Error::Parse(format!("expected (num)/(den), got {text:?}")))?;
    let num = num
        .strip_prefix('(')
        .ok_or_else(|| Error::Parse(format!("missing '(' in {text:?}")))?;
    let den = den
        .strip_suffix(')')
        .ok_or_else(|| Error::Parse(format!("missing ')' in {text:?}")))?;
    let num = parse_poly(num)?;
    let den = parse_poly(den)?;
    if den.is_zero() {
        return Err(Error::Parse("zero denominator".into()));
    }
    ExactScalar::from_fraction(&num, &den)
}

pub fn format_f64(x: f64) -> String {
    format!("{x:+.16e}")
}

pub fn format_complex(z: Complex64) -> String {
    format!("{:+.16e}{:+.16e}i", z.re, z.im)
}

pub fn parse_complex(text: &str) -> Result<Complex64> {
    let t = text.trim();
    let body = t
        .strip_suffix('i')
        .ok_or_else(|| Error::Parse(format!("complex value must end in 'i': {t:?}")))?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(|| Error::Parse(format!("no imaginary part in {t:?}")))?;
    let re: f64 = body[..split]
        .parse()
        .map_err(|_| Error::Parse(format!("bad real part in {t:?}")))?;
    let im: f64 = body[split..]
        .parse()
        .map_err(|_| Error::Parse(format!("bad imaginary part in {t:?}")))?;
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_text_is_lossless() {
        for z in [
            Complex64::new(0.1, -0.2),
            Complex64::new(-1e-300, 3.5e17),
            Complex64::new(std::f64::consts::PI, 0.0),
        ] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
    }

    #[test]
    fn exact_text_form() {
        let a = ExactScalar::var(0);
        let g1 = ExactScalar::var(2);
        let s = a
            .sub(&g1)
            .checked_div(&ExactScalar::var(1).sub(&ExactScalar::one()))
            .unwrap();
        let text = format_exact(&s);
        assert_eq!(text, "(1*a^1 + -1*g1^1)/(1*b^1 + -1)");
        assert_eq!(parse_exact(&text).unwrap(), s);
    }

    #[test]
    fn laurent_exponents_print_negative() {
        let s = ExactScalar::var(2).inv().unwrap();
        assert_eq!(format_exact(&s), "(1*g1^-1)/(1)");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_exact("a+b").is_err());
        assert!(parse_exact("(1*q^1)/(1)").is_err());
        assert!(parse_exact("(1)/(0)").is_err());
    }
}

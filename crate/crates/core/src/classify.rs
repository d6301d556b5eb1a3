//! Irreducibility classification of concrete parameters, invariant
//! subspaces at reducible points, and Burnside closure.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indexing::BinaryIndex;
use crate::matrix::SquareMatrix;
use crate::monodromy::{self, Basis};
use crate::params::{Param, ParameterPoint};
use crate::scalars::{Generators, PairedScalar, Scalar, DEFAULT_TOL};

/// Distance to ℤ below which a numeric parameter is flagged as a near miss.
pub const NEAR_MISS: f64 = 1e-6;

/// (a^I, b^I, c^I) with a^I = a + Σ iₖ(1−cₖ), b^I likewise, and
/// c^I_k = cₖ or 2 − cₖ as iₖ is 0 or 1.
pub fn shifted_parameters(p: &ParameterPoint, index: &BinaryIndex) -> Result<(Param, Param, Vec<Param>)> {
    if index.m() != p.m() {
        return Err(Error::LengthMismatch(index.m(), p.m()));
    }
    let shift = p.index_shift(index);
    let c = (1..=p.m())
        .map(|k| {
            if index.bit(k) == 1 {
                Param::int(2) - p.c(k)
            } else {
                p.c(k)
            }
        })
        .collect();
    Ok((p.a + shift, p.b + shift, c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    A,
    B,
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Which::A => "a",
            Which::B => "b",
        })
    }
}

/// One failing condition: a^I (or b^I) equals `value`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub index: BinaryIndex,
    pub which: Which,
    pub value: i64,
}

/// A numeric condition that holds, but only barely.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearMiss {
    pub index: BinaryIndex,
    pub which: Which,
    pub distance: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FailureScan {
    pub failures: Vec<Failure>,
    pub near_misses: Vec<NearMiss>,
}

fn scan(p: &ParameterPoint, tol: f64, value: impl Fn(&BinaryIndex, Which) -> Param) -> FailureScan {
    let mut out = FailureScan::default();
    for index in BinaryIndex::all(p.m()) {
        for which in [Which::A, Which::B] {
            let x = value(&index, which);
            if let Some(v) = x.integer_value(tol) {
                out.failures.push(Failure { index, which, value: v });
            } else if !x.is_exact() && x.distance_to_integer() < NEAR_MISS {
                out.near_misses.push(NearMiss {
                    index,
                    which,
                    distance: x.distance_to_integer(),
                });
            }
        }
    }
    out
}

/// Every I with a^I ∈ ℤ or b^I ∈ ℤ. Rational inputs are tested exactly;
/// complex inputs within `tol`.
pub fn irreducibility_failures(p: &ParameterPoint, tol: f64) -> FailureScan {
    scan(p, tol, |index, which| {
        let shift = p.index_shift(index);
        match which {
            Which::A => p.a + shift,
            Which::B => p.b + shift,
        }
    })
}

/// The same conditions in the form a − Σ iₖcₖ ∉ ℤ; `value` is then
/// a − Σ iₖcₖ rather than a^I.
pub fn irreducibility_failures_unshifted(p: &ParameterPoint, tol: f64) -> FailureScan {
    scan(p, tol, |index, which| {
        let base = match which {
            Which::A => p.a,
            Which::B => p.b,
        };
        (1..=p.m())
            .filter(|&k| index.bit(k) == 1)
            .fold(base, |acc, k| acc - p.c(k))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubspaceBasis {
    #[serde(rename = "F-basis")]
    F,
    #[serde(rename = "F'-basis")]
    FPrime,
}

impl fmt::Display for SubspaceBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubspaceBasis::F => "F-basis",
            SubspaceBasis::FPrime => "F'-basis",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReducibleCase {
    /// a^I (or b^I) is a negative integer: span{F_I} is invariant.
    NegativeInteger,
    /// a^I (or b^I) is a non-negative integer: span{F′_{I′} : I′ ≠ I} is invariant.
    NonNegativeInteger,
}

impl fmt::Display for ReducibleCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReducibleCase::NegativeInteger => "negative-integer",
            ReducibleCase::NonNegativeInteger => "non-negative-integer",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceDescription {
    pub basis_label: SubspaceBasis,
    pub dimension: usize,
    pub indices: Vec<BinaryIndex>,
    pub case: ReducibleCase,
    pub failure: Failure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub m: usize,
    pub irreducible: bool,
    pub failures: Vec<Failure>,
    pub near_misses: Vec<NearMiss>,
    /// k with cₖ ∈ ℤ.
    pub c_integrality: Vec<usize>,
    pub lambda_is_one: bool,
    pub multiple_failures: bool,
    pub invariant_subspace: Option<SubspaceDescription>,
}

impl ClassificationReport {
    pub fn verdict(&self) -> &'static str {
        if self.irreducible {
            "irreducible"
        } else {
            "reducible"
        }
    }
}

pub fn classify(p: &ParameterPoint, tol: f64) -> ClassificationReport {
    let m = p.m();
    let FailureScan { failures, near_misses } = irreducibility_failures(p, tol);
    let c_integrality: Vec<usize> = (1..=m).filter(|&k| p.c(k).integer_value(tol).is_some()).collect();
    let lambda_is_one = p.lambda_exponent().integer_value(tol).is_some();
    let multiple_failures = failures.len() > 1;
    let invariant_subspace = match failures.as_slice() {
        [f] if c_integrality.is_empty() => Some(subspace_for(m, f)),
        _ => None,
    };
    ClassificationReport {
        m,
        irreducible: failures.is_empty(),
        failures,
        near_misses,
        c_integrality,
        lambda_is_one,
        multiple_failures,
        invariant_subspace,
    }
}

fn subspace_for(m: usize, f: &Failure) -> SubspaceDescription {
    if f.value < 0 {
        SubspaceDescription {
            basis_label: SubspaceBasis::F,
            dimension: 1,
            indices: vec![f.index],
            case: ReducibleCase::NegativeInteger,
            failure: f.clone(),
        }
    } else {
        let indices: Vec<_> = BinaryIndex::all(m).filter(|i| *i != f.index).collect();
        SubspaceDescription {
            basis_label: SubspaceBasis::FPrime,
            dimension: indices.len(),
            indices,
            case: ReducibleCase::NonNegativeInteger,
            failure: f.clone(),
        }
    }
}

/// Largest component of a generator's image of the subspace that falls
/// outside it, over M₀ … Mₘ built at `p`.
///
/// Case (i) uses the F-basis matrices Mᵢ on span{e_I}. Case (ii) uses the
/// F′-basis matrices M′ᵢ = H Mᵢ H⁻¹ = ᵗMᵢ on the coordinate complement of
/// e_I, evaluated as ᵗMᵢ (H itself degenerates at p).
pub fn verify_invariant_subspace(desc: &SubspaceDescription, p: &ParameterPoint, tol: f64) -> Result<f64> {
    let report = classify(p, tol);
    if report.invariant_subspace.as_ref() != Some(desc) {
        return Err(Error::NoInvariantSubspace(format!(
            "the description does not match the classification of {}",
            describe_point(p)
        )));
    }
    let gen = Generators::numeric(p, tol);
    let mats = monodromy::generators(&gen, Basis::Plain)?;
    let n = gen.dim();
    let i = desc.failure.index.position();
    let mut worst = 0.0f64;
    for mat in &mats {
        match desc.case {
            ReducibleCase::NegativeInteger => {
                for r in (0..n).filter(|&r| r != i) {
                    worst = worst.max(mat.get(r, i).residual());
                }
            }
            ReducibleCase::NonNegativeInteger => {
                let t = mat.transpose();
                for c in (0..n).filter(|&c| c != i) {
                    worst = worst.max(t.get(i, c).residual());
                }
            }
        }
    }
    Ok(worst)
}

fn describe_point(p: &ParameterPoint) -> String {
    let c: Vec<String> = p.c.iter().map(|c| c.to_string()).collect();
    format!("(a, b, c) = ({}, {}, ({}))", p.a, p.b, c.join(", "))
}

/// Dimension of the span of all words in `generators` and their inverses.
/// Each round multiplies the current span by every generator and
/// re-orthonormalises by SVD until the dimension stops growing. Singular
/// values (relative to the largest) above `1e3 · tol` are kept and those
/// below `tol` dropped; if any fall in between, the closure is rerun with
/// them dropped and the answer is ambiguous only when the two runs differ.
/// Only the value component of each matrix is used.
pub fn algebra_dimension(generators: &[SquareMatrix<PairedScalar>], tol: f64) -> Result<usize> {
    let Some(first) = generators.first() else {
        return Ok(1);
    };
    let n = first.size();
    let mut gens: Vec<DMatrix<Complex64>> = Vec::with_capacity(2 * generators.len());
    for g in generators {
        let c = DMatrix::from_fn(n, n, |i, j| g.get(i, j).value);
        let inv = c.clone().try_inverse().ok_or(Error::Singular)?;
        gens.push(c);
        gens.push(inv);
    }
    let high = 1e3 * tol;
    let (lenient, band) = closure(&gens, n, tol, high);
    let Some(residual) = band else {
        return Ok(lenient);
    };
    let (strict, _) = closure(&gens, n, high, high);
    if strict == lenient {
        Ok(lenient)
    } else {
        Err(Error::RankToleranceAmbiguous {
            residual,
            low: tol,
            high,
        })
    }
}

/// Closure keeping relative singular values above `keep`; also returns the
/// smallest one seen in `(keep.min(high), high]`, if any.
fn closure(gens: &[DMatrix<Complex64>], n: usize, keep: f64, high: f64) -> (usize, Option<f64>) {
    let id = DMatrix::<Complex64>::identity(n, n);
    let mut span = vec![id.clone() / Complex64::new(id.norm(), 0.0)];
    let mut band: Option<f64> = None;
    loop {
        let mut candidates = span.clone();
        for q in &span {
            for g in gens {
                let y = g * q;
                let norm = y.norm();
                candidates.push(y / Complex64::new(norm, 0.0));
            }
        }
        let stacked = DMatrix::from_fn(n * n, candidates.len(), |r, c| candidates[c][r]);
        let svd = stacked.svd(true, false);
        let u = svd.u.expect("requested");
        let sigma_max = svd.singular_values.max();
        let mut next = Vec::new();
        for (k, s) in svd.singular_values.iter().enumerate() {
            let ratio = s / sigma_max;
            if ratio > keep && ratio <= high {
                band = Some(band.map_or(ratio, |b: f64| b.min(ratio)));
            }
            if ratio > keep {
                next.push(DMatrix::from_column_slice(n, n, u.column(k).as_slice()));
            }
        }
        if next.len() == span.len() || next.len() == n * n {
            return (next.len(), band);
        }
        span = next;
    }
}

/// Numeric M̃₀ … M̃ₘ at `p`; defined even when some cₖ ∈ ℤ.
pub fn tilde_generators_at(p: &ParameterPoint, tol: f64) -> Result<Vec<SquareMatrix<PairedScalar>>> {
    monodromy::generators(&Generators::numeric(p, tol), Basis::Tilde)
}

/// Burnside closure dimension of the tilde-basis generators at `p`.
pub fn closure_dimension_at(p: &ParameterPoint, tol: f64) -> Result<usize> {
    algebra_dimension(&tilde_generators_at(p, tol)?, tol)
}

/// Random exact rational point whose a, b, cₖ have denominators at most
/// `max_den` and lie in (−2, 2). Rejects points with any a^I or b^I within
/// [`NEAR_MISS`] of ℤ, and (if `allow_integer_c` is false) integer cₖ.
pub fn random_admissible_point<R: Rng>(rng: &mut R, m: usize, max_den: i64, allow_integer_c: bool) -> ParameterPoint {
    let draw = |rng: &mut R| {
        let d = rng.gen_range(1..=max_den);
        let n = rng.gen_range(-2 * d + 1..2 * d);
        Param::Rational(Rational64::new(n, d))
    };
    loop {
        let a = draw(rng);
        let b = draw(rng);
        let c: Vec<Param> = (0..m).map(|_| draw(rng)).collect();
        let p = ParameterPoint::new(a, b, c).expect("m >= 1");
        if !allow_integer_c && p.c.iter().any(|c| c.integer_value(0.0).is_some()) {
            continue;
        }
        let scan = irreducibility_failures(&p, DEFAULT_TOL);
        let close = BinaryIndex::all(m).any(|index| {
            let s = p.index_shift(&index);
            (p.a + s).distance_to_integer() < NEAR_MISS || (p.b + s).distance_to_integer() < NEAR_MISS
        });
        if scan.failures.is_empty() && !close {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(a: &str, b: &str, c: &[&str]) -> ParameterPoint {
        ParameterPoint::parse(a, b, c).unwrap()
    }

    #[test]
    fn shifted_examples() {
        let p = pt("1/2", "1/3", &["1/5"]);
        let (a0, b0, c0) = shifted_parameters(&p, &BinaryIndex::zero(1)).unwrap();
        assert_eq!((a0, b0, c0), (p.a, p.b, p.c.clone()));
        let (a1, _, c1) = shifted_parameters(&p, &BinaryIndex::ones(1)).unwrap();
        assert_eq!(a1, Param::rational(13, 10));
        assert_eq!(c1[0], Param::rational(9, 5));
        let q = ParameterPoint::new(a1, p.b, c1).unwrap();
        let (_, _, back) = shifted_parameters(&q, &BinaryIndex::ones(1)).unwrap();
        assert_eq!(back, p.c);
    }

    #[test]
    fn failure_examples() {
        assert!(irreducibility_failures(&pt("1/2", "1/3", &["1/5"]), 0.0)
            .failures
            .is_empty());
        let f = irreducibility_failures(&pt("-1", "1/3", &["1/5"]), 0.0).failures;
        assert_eq!(
            f,
            vec![Failure {
                index: BinaryIndex::zero(1),
                which: Which::A,
                value: -1
            }]
        );
        assert!(irreducibility_failures(&pt("1/2", "1/3", &["2", "-1"]), 0.0)
            .failures
            .is_empty());
    }

    #[test]
    fn classify_examples() {
        let r = classify(&pt("-1", "1/3", &["1/5"]), DEFAULT_TOL);
        assert!(!r.irreducible);
        let s = r.invariant_subspace.as_ref().unwrap();
        assert_eq!(s.case, ReducibleCase::NegativeInteger);
        assert_eq!(s.basis_label, SubspaceBasis::F);
        assert_eq!(s.indices, vec![BinaryIndex::zero(1)]);
        assert_eq!(s.dimension, 1);

        let r = classify(&pt("2", "1/3", &["1/5"]), DEFAULT_TOL);
        let s = r.invariant_subspace.as_ref().unwrap();
        assert_eq!(s.case, ReducibleCase::NonNegativeInteger);
        assert_eq!(s.basis_label, SubspaceBasis::FPrime);
        assert_eq!(s.dimension, 1);
        assert_eq!(s.indices, vec![BinaryIndex::ones(1)]);

        let r = classify(&pt("1/2", "1/3", &["1/5"]), DEFAULT_TOL);
        assert!(r.irreducible && r.invariant_subspace.is_none() && !r.multiple_failures);
    }

    #[test]
    fn multiple_failures_construct_nothing() {
        let r = classify(&pt("-1", "2", &["1/5"]), DEFAULT_TOL);
        assert!(r.multiple_failures);
        assert_eq!(r.failures.len(), 2);
        assert!(r.invariant_subspace.is_none());
    }

    #[test]
    fn lambda_flag() {
        // ℓ = (m−1)/2 − a − b + c = 0 − 1/3 − 1/2 + 5/6 = 0
        let r = classify(&pt("1/3", "1/2", &["5/6"]), DEFAULT_TOL);
        assert!(r.lambda_is_one);
        assert!(r.irreducible);
    }

    #[test]
    fn complex_inputs_flag_near_misses() {
        let p = pt("-1.00000001", "0.3", &["0.2"]);
        let r = irreducibility_failures(&p, DEFAULT_TOL);
        assert!(r.failures.is_empty());
        assert_eq!(r.near_misses.len(), 1);
        let r = irreducibility_failures(&p, 1e-7);
        assert_eq!(r.failures.len(), 1);
    }

    #[test]
    fn invariant_subspaces_at_worked_points() {
        for (a, b) in [("-1", "1/3"), ("2", "1/3"), ("1/3", "-2"), ("1/3", "0")] {
            let p = pt(a, b, &["1/5"]);
            let r = classify(&p, DEFAULT_TOL);
            let desc = r.invariant_subspace.unwrap();
            let res = verify_invariant_subspace(&desc, &p, DEFAULT_TOL).unwrap();
            assert!(res < 1e-12, "({a}, {b}): {res:e}");
        }
    }

    #[test]
    fn refuses_irreducible_points() {
        let bad = pt("-1", "1/3", &["1/5"]);
        let desc = classify(&bad, DEFAULT_TOL).invariant_subspace.unwrap();
        let good = pt("1/2", "1/3", &["1/5"]);
        assert!(matches!(
            verify_invariant_subspace(&desc, &good, DEFAULT_TOL),
            Err(Error::NoInvariantSubspace(_))
        ));
    }

    #[test]
    fn closure_dimensions() {
        assert_eq!(
            closure_dimension_at(&pt("1/2", "1/3", &["1/5"]), DEFAULT_TOL).unwrap(),
            4
        );
        assert_eq!(
            closure_dimension_at(&pt("1/2", "1/3", &["1/5", "2/7"]), DEFAULT_TOL).unwrap(),
            16
        );
        assert!(closure_dimension_at(&pt("-1", "1/3", &["1/5"]), DEFAULT_TOL).unwrap() < 4);
        assert!(closure_dimension_at(&pt("2", "1/3", &["1/5", "2/7"]), DEFAULT_TOL).unwrap() < 16);
        assert!(closure_dimension_at(&pt("1/2", "-1", &["1/5", "2/7", "3/8"]), DEFAULT_TOL).unwrap() < 64);
        assert_eq!(
            closure_dimension_at(&pt("1/2", "1/3", &["1", "2/7", "0"]), DEFAULT_TOL).unwrap(),
            64
        );
    }

    #[test]
    fn sampler_respects_conditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = random_admissible_point(&mut rng, 3, 9, false);
            assert!(classify(&p, 0.0).irreducible);
            assert!(p.c.iter().all(|c| c.integer_value(0.0).is_none()));
        }
    }

    #[test]
    fn shifted_and_unshifted_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let m = rng.gen_range(1..=3);
            let d = rng.gen_range(1..=3);
            let mut draw = || Param::rational(rng.gen_range(-6..6), d);
            let p = ParameterPoint::new(draw(), draw(), (0..m).map(|_| draw()).collect()).unwrap();
            let a: Vec<_> = irreducibility_failures(&p, 0.0)
                .failures
                .into_iter()
                .map(|f| (f.index, f.which, f.value))
                .collect();
            let b: Vec<_> = irreducibility_failures_unshifted(&p, 0.0)
                .failures
                .into_iter()
                .map(|f| (f.index, f.which, f.value + f.index.weight() as i64))
                .collect();
            assert_eq!(a, b);
        }
    }
}

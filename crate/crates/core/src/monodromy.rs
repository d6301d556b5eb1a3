//! Circuit matrices, intersection matrices and the change of basis Pₘ.
//!
//! Every builder takes a [`Generators`] and works for both backings. Rows
//! and columns are indexed by [`BinaryIndex::position`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indexing::BinaryIndex;
use crate::matrix::{ColumnVector, SquareMatrix};
use crate::scalars::{Generators, Scalar};

/// Plain basis {F_I} or tilde basis {F̃_I} = {F_I}·Pₘ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Plain,
    Tilde,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Plain => "plain",
            Basis::Tilde => "tilde",
        })
    }
}

impl FromStr for Basis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Basis::Plain),
            "tilde" => Ok(Basis::Tilde),
            _ => Err(Error::Parse(format!("unknown basis {s:?}"))),
        }
    }
}

fn check_k<S>(gen: &Generators<S>, k: usize) -> Result<()>
where
    S: Scalar,
{
    if (1..=gen.m()).contains(&k) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "generator index {k} outside 1..={}",
            gen.m()
        )))
    }
}

fn two_by_two<S: Scalar>(a: S, b: S, c: S, d: S) -> SquareMatrix<S> {
    SquareMatrix::from_rows(vec![vec![a, b], vec![c, d]]).expect("2x2")
}

/// A₁ ⊗ A₂ ⊗ … ⊗ Aₘ in the blockwise tensor order.
pub fn tensor_all<S: Scalar>(factors: &[SquareMatrix<S>]) -> SquareMatrix<S> {
    let mut it = factors.iter();
    let first = it.next().expect("at least one factor").clone();
    it.fold(first, |acc, f| acc.tensor(f))
}

/// E₂ ⊗ … ⊗ A ⊗ … ⊗ E₂ with A in slot k.
fn in_slot<S: Scalar>(m: usize, k: usize, a: SquareMatrix<S>) -> SquareMatrix<S> {
    let factors: Vec<_> = (1..=m)
        .map(|j| if j == k { a.clone() } else { SquareMatrix::identity(2) })
        .collect();
    tensor_all(&factors)
}

/// G_k = diag(1, γₖ⁻¹).
pub fn build_gk<S: Scalar>(gen: &Generators<S>, k: usize) -> Result<SquareMatrix<S>> {
    check_k(gen, k)?;
    Ok(two_by_two(S::one(), S::zero(), S::zero(), gen.inv(gen.gamma(k))?))
}

/// Q_k = [[1 − γₖ, 1], [0, 1]].
pub fn build_qk<S: Scalar>(gen: &Generators<S>, k: usize) -> Result<SquareMatrix<S>> {
    check_k(gen, k)?;
    Ok(two_by_two(S::one().sub(gen.gamma(k)), S::one(), S::zero(), S::one()))
}

/// G̃_k = [[1, −γₖ⁻¹], [0, γₖ⁻¹]].
pub fn build_tilde_gk<S: Scalar>(gen: &Generators<S>, k: usize) -> Result<SquareMatrix<S>> {
    check_k(gen, k)?;
    let gi = gen.inv(gen.gamma(k))?;
    Ok(two_by_two(S::one(), gi.neg(), S::zero(), gi))
}

/// Diagonal of H: H_{I,I} = ∏ₖ (−1)^{iₖ} γₖ^{1−iₖ}/(γₖ−1) · (α−γ^I)(β−γ^I)/((α−∏γ)(β−1)).
pub fn h_diagonal<S: Scalar>(gen: &Generators<S>) -> Result<ColumnVector<S>> {
    let m = gen.m();
    let one = S::one();
    let outer_den = gen.alpha().sub(&gen.gamma_product()).mul(&gen.beta().sub(&one));
    let mut entries = Vec::with_capacity(gen.dim());
    for index in BinaryIndex::all(m) {
        let gi = gen.gamma_power(&index, 1)?;
        let mut num = gen.alpha().sub(&gi).mul(&gen.beta().sub(&gi));
        let mut den = outer_den.clone();
        for k in 1..=m {
            let g = gen.gamma(k);
            if index.bit(k) == 1 {
                num = num.neg();
            } else {
                num = num.mul(g);
            }
            den = den.mul(&g.sub(&one));
        }
        entries.push(gen.div(&num, &den)?);
    }
    Ok(ColumnVector::new(entries))
}

pub fn build_h<S: Scalar>(gen: &Generators<S>) -> Result<SquareMatrix<S>> {
    Ok(SquareMatrix::diagonal(h_diagonal(gen)?.entries().to_vec()))
}

/// M_k: diagonal with γₖ^{−iₖ} at I.
pub fn build_mk<S: Scalar>(gen: &Generators<S>, k: usize) -> Result<SquareMatrix<S>> {
    Ok(in_slot(gen.m(), k, build_gk(gen, k)?))
}

/// The row vector c·ᵗ𝟙·H with c = (β−1)(α−∏γ)/(αβ), with the common factor
/// cancelled: entry J is ∏ₖ (−1)^{jₖ} γₖ^{1−jₖ}/(γₖ−1) · (α−γ^J)(β−γ^J)/(αβ).
pub fn m0_row<S: Scalar>(gen: &Generators<S>) -> Result<ColumnVector<S>> {
    let m = gen.m();
    let one = S::one();
    let ab = gen.alpha().mul(gen.beta());
    let mut entries = Vec::with_capacity(gen.dim());
    for index in BinaryIndex::all(m) {
        let gj = gen.gamma_power(&index, 1)?;
        let mut num = gen.alpha().sub(&gj).mul(&gen.beta().sub(&gj));
        let mut den = ab.clone();
        for k in 1..=m {
            let g = gen.gamma(k);
            if index.bit(k) == 1 {
                num = num.neg();
            } else {
                num = num.mul(g);
            }
            den = den.mul(&g.sub(&one));
        }
        entries.push(gen.div(&num, &den)?);
    }
    Ok(ColumnVector::new(entries))
}

/// M₀ = E − (β−1)(α−∏γ)/(αβ) · 𝟙·ᵗ𝟙·H.
pub fn build_m0<S: Scalar>(gen: &Generators<S>) -> Result<SquareMatrix<S>> {
    let n = gen.dim();
    let row = m0_row(gen)?;
    Ok(SquareMatrix::identity(n).sub(&ColumnVector::ones(n).outer(&row)))
}

/// Pₘ = Q₁ ⊗ … ⊗ Qₘ.
pub fn build_pm<S: Scalar>(gen: &Generators<S>) -> Result<SquareMatrix<S>> {
    let qs = (1..=gen.m()).map(|k| build_qk(gen, k)).collect::<Result<Vec<_>>>()?;
    Ok(tensor_all(&qs))
}

/// Pₘ from the recursion [[P_{m−1}(1−γₘ), P_{m−1}], [O, P_{m−1}]].
pub fn build_pm_recursive<S: Scalar>(gen: &Generators<S>) -> Result<SquareMatrix<S>> {
    let mut p = build_qk(gen, 1)?;
    for k in 2..=gen.m() {
        let scaled = p.scale(&S::one().sub(gen.gamma(k)));
        let zero = SquareMatrix::zeros(p.size());
        p = SquareMatrix::block2(&scaled, &p, &zero, &p);
    }
    Ok(p)
}

pub fn build_tilde_mk<S: Scalar>(gen: &Generators<S>, k: usize) -> Result<SquareMatrix<S>> {
    Ok(in_slot(gen.m(), k, build_tilde_gk(gen, k)?))
}

/// The vector v with M̃₀ = E − ᵗ(0, …, 0, v).
pub fn tilde_v<S: Scalar>(gen: &Generators<S>) -> Result<ColumnVector<S>> {
    let m = gen.m();
    let one = S::one();
    let ab = gen.alpha().mul(gen.beta());
    let sign = |e: u32| if e.is_multiple_of(2) { S::one() } else { S::one().neg() };
    let mut entries = Vec::with_capacity(gen.dim());
    for index in BinaryIndex::all(m) {
        let w = index.weight();
        let num = if w == 0 {
            gen.alpha()
                .sub(&one)
                .mul(&gen.beta().sub(&one))
                .mul(&gen.gamma_product())
                .mul(&sign(m as u32))
        } else {
            let gi = gen.gamma_power(&index, 1)?;
            let mut t = ab.add(&sign(w).mul(&gi));
            for k in 1..=m {
                if index.bit(k) == 0 {
                    t = t.mul(gen.gamma(k));
                }
            }
            t.mul(&sign(m as u32 + w))
        };
        entries.push(gen.div(&num, &ab)?);
    }
    Ok(ColumnVector::new(entries))
}

/// N₀ = ᵗ(0, …, 0, v): last row ᵗv, all other rows zero.
pub fn build_n0<S: Scalar>(v: &ColumnVector<S>) -> SquareMatrix<S> {
    let n = v.len();
    SquareMatrix::from_fn(n, |i, j| if i == n - 1 { v.get(j).clone() } else { S::zero() })
}

pub fn build_tilde_m0<S: Scalar>(gen: &Generators<S>) -> Result<(SquareMatrix<S>, ColumnVector<S>)> {
    let v = tilde_v(gen)?;
    let m0 = SquareMatrix::identity(gen.dim()).sub(&build_n0(&v));
    Ok((m0, v))
}

/// H̃ entrywise from its closed forms; no factor γₖ − 1 is ever divided by.
pub fn build_tilde_h<S: Scalar>(gen: &Generators<S>) -> Result<SquareMatrix<S>> {
    let m = gen.m();
    let one = S::one();
    let a_den = gen.alpha().sub(&gen.gamma_product());
    let disjoint = gen.div(&gen.alpha().sub(&one), &a_den)?;
    let ab = gen.alpha().mul(gen.beta());
    let joint_den = a_den.mul(&gen.beta().sub(&one));
    let n = gen.dim();
    SquareMatrix::try_from_fn(n, |r, c| {
        let i = BinaryIndex::from_position(m, r);
        let ip = BinaryIndex::from_position(m, c);
        let meet = i.meet(&ip)?;
        let mut t = if meet.weight() == 0 {
            disjoint.clone()
        } else {
            let g = gen.gamma_power(&meet, 1)?;
            let g = if meet.weight() % 2 == 0 { g } else { g.neg() };
            gen.div(&ab.add(&g), &joint_den)?
        };
        for k in 1..=m {
            let (ik, ipk) = (i.bit(k), ip.bit(k));
            let g = gen.gamma(k);
            if ipk == 1 && ik == 0 {
                t = t.mul(&g.neg());
            }
            if ik == 0 && ipk == 0 {
                t = t.mul(&one.sub(g));
            }
        }
        Ok(t)
    })
}

/// Named generator matrix of the chosen basis: index 0 is M₀, k ≥ 1 is M_k.
pub fn generator<S: Scalar>(gen: &Generators<S>, basis: Basis, i: usize) -> Result<SquareMatrix<S>> {
    match (basis, i) {
        (Basis::Plain, 0) => build_m0(gen),
        (Basis::Plain, k) => build_mk(gen, k),
        (Basis::Tilde, 0) => Ok(build_tilde_m0(gen)?.0),
        (Basis::Tilde, k) => build_tilde_mk(gen, k),
    }
}

/// All of M₀, M₁, …, Mₘ in the chosen basis.
pub fn generators<S: Scalar>(gen: &Generators<S>, basis: Basis) -> Result<Vec<SquareMatrix<S>>> {
    (0..=gen.m()).map(|i| generator(gen, basis, i)).collect()
}

/// H for the plain basis, H̃ for the tilde basis.
pub fn intersection_matrix<S: Scalar>(gen: &Generators<S>, basis: Basis) -> Result<SquareMatrix<S>> {
    match basis {
        Basis::Plain => build_h(gen),
        Basis::Tilde => build_tilde_h(gen),
    }
}

/// e_v = ᵗ(0, …, 0, 1).
pub fn e_v<S: Scalar>(n: usize) -> ColumnVector<S> {
    ColumnVector::unit(n, n - 1)
}

/// Matrix with columns M̃₁^{i₁}⋯M̃ₘ^{iₘ}·e_v in index order.
pub fn basis_matrix<S: Scalar>(gen: &Generators<S>) -> Result<SquareMatrix<S>> {
    let m = gen.m();
    let n = gen.dim();
    let mks = (1..=m).map(|k| build_tilde_mk(gen, k)).collect::<Result<Vec<_>>>()?;
    let cols: Vec<ColumnVector<S>> = BinaryIndex::all(m)
        .map(|index| {
            let mut v = e_v(n);
            for k in (1..=m).rev() {
                if index.bit(k) == 1 {
                    v = mks[k - 1].mul_vec(&v);
                }
            }
            v
        })
        .collect();
    SquareMatrix::from_columns(&cols)
}

/// det(Pₘ) = ∏ₖ (1−γₖ)^{2^{m−1}}.
pub fn det_pm_closed<S: Scalar>(gen: &Generators<S>) -> Result<S> {
    let e = 1i32 << (gen.m() - 1);
    let mut acc = S::one();
    for k in 1..=gen.m() {
        acc = acc.mul(&S::one().sub(gen.gamma(k)).powi(e, gen.tol())?);
    }
    Ok(acc)
}

/// ∏_I (α−γ^I)(β−γ^I)/d, divided factor by factor.
fn product_over_indices<S: Scalar>(gen: &Generators<S>, d: &S) -> Result<S> {
    let mut acc = S::one();
    for index in BinaryIndex::all(gen.m()) {
        let g = gen.gamma_power(&index, 1)?;
        let f = gen.alpha().sub(&g).mul(&gen.beta().sub(&g));
        acc = acc.mul(&gen.div(&f, d)?);
    }
    Ok(acc)
}

fn pole_factor<S: Scalar>(gen: &Generators<S>) -> S {
    gen.alpha().sub(&gen.gamma_product()).mul(&gen.beta().sub(&S::one()))
}

/// det(H) = (−1)^{m2^{m−1}} ∏γₖ^{2^{m−1}} ∏_I(α−γ^I)(β−γ^I)
/// / (∏(γₖ−1)^{2^m} (α−∏γ)^{2^m} (β−1)^{2^m}).
pub fn det_h_closed<S: Scalar>(gen: &Generators<S>) -> Result<S> {
    let m = gen.m();
    let mut d = pole_factor(gen);
    for k in 1..=m {
        d = d.mul(&gen.gamma(k).sub(&S::one()));
    }
    let mut det = product_over_indices(gen, &d)?.mul(&gen.gamma_product().powi(1i32 << (m - 1), gen.tol())?);
    if (m * (1 << (m - 1))) % 2 == 1 {
        det = det.neg();
    }
    Ok(det)
}

/// det(H̃) = ∏_I(α−γ^I)(β−γ^I) / ((α−∏γ)^{2^m} (β−1)^{2^m}).
pub fn det_tilde_h_closed<S: Scalar>(gen: &Generators<S>) -> Result<S> {
    product_over_indices(gen, &pole_factor(gen))
}

/// ∏ₖ γₖ^{−2^{m−1}}.
pub fn basis_det_closed<S: Scalar>(gen: &Generators<S>) -> Result<S> {
    gen.gamma_product().powi(-(1i32 << (gen.m() - 1)), gen.tol())
}

/// Both sides of
/// Σ_{J≤I} (−1)^{|J|}(αβ∏γₖ^{1−jₖ} + ∏γₖ^{1+jₖ}) = (αβ + (−1)^{|I|}γ^I) ∏γₖ^{1−iₖ}(γₖ−1)^{iₖ}.
pub fn sum_identity<S: Scalar>(gen: &Generators<S>, index: &BinaryIndex) -> Result<(S, S)> {
    let m = gen.m();
    if index.m() != m {
        return Err(Error::LengthMismatch(index.m(), m));
    }
    let ab = gen.alpha().mul(gen.beta());
    let gp = gen.gamma_product();
    let mut lhs = S::zero();
    for j in index.lower_set() {
        let gj = gen.gamma_power(&j, 1)?;
        let first = ab.mul(&gen.div(&gp, &gj)?);
        let second = gp.mul(&gj);
        let term = first.add(&second);
        lhs = if j.weight() % 2 == 0 {
            lhs.add(&term)
        } else {
            lhs.sub(&term)
        };
    }
    let gi = gen.gamma_power(index, 1)?;
    let mut rhs = if index.weight().is_multiple_of(2) {
        ab.add(&gi)
    } else {
        ab.sub(&gi)
    };
    for k in 1..=m {
        let g = gen.gamma(k);
        rhs = rhs.mul(&if index.bit(k) == 1 { g.sub(&S::one()) } else { g.clone() });
    }
    Ok((lhs, rhs))
}

/// Basis of ker ᵗv: pivoting on entry p of v, the vectors v_p·e_j − v_j·e_p
/// for j ≠ p. Returns all unit vectors when v = 0.
pub fn rank_one_kernel<S: Scalar>(v: &ColumnVector<S>) -> Vec<ColumnVector<S>> {
    let n = v.len();
    let pivot = if S::EXACT {
        (0..n).rev().find(|&i| !v.get(i).is_zero())
    } else {
        (0..n)
            .filter(|&i| !v.get(i).is_zero())
            .max_by(|&i, &j| v.get(i).residual().total_cmp(&v.get(j).residual()))
    };
    let Some(p) = pivot else {
        return (0..n).map(|j| ColumnVector::unit(n, j)).collect();
    };
    (0..n)
        .filter(|&j| j != p)
        .map(|j| {
            ColumnVector::new(
                (0..n)
                    .map(|i| {
                        if i == j {
                            v.get(p).clone()
                        } else if i == p {
                            v.get(j).neg()
                        } else {
                            S::zero()
                        }
                    })
                    .collect(),
            )
        })
        .collect()
}

/// One letter ρᵢ or ρᵢ⁻¹ of a loop word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

/// A word ρ_{w₁}ρ_{w₂}⋯ in traversal order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LoopWord {
    letters: Vec<Letter>,
}

impl LoopWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        LoopWord { letters }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a word from signed labels: `i` is ρᵢ and `!i` via `inverse`.
    pub fn from_labels(labels: &[(usize, bool)]) -> Self {
        Self::new(
            labels
                .iter()
                .map(|&(generator, inverse)| Letter { generator, inverse })
                .collect(),
        )
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self::new(letters)
    }

    pub fn pow(&self, k: usize) -> Self {
        Self::new(
            self.letters
                .iter()
                .copied()
                .cycle()
                .take(self.letters.len() * k)
                .collect(),
        )
    }

    pub fn inverse(&self) -> Self {
        Self::new(
            self.letters
                .iter()
                .rev()
                .map(|l| Letter {
                    generator: l.generator,
                    inverse: !l.inverse,
                })
                .collect(),
        )
    }
}

impl fmt::Display for LoopWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| format!("r{}{}", l.generator, if l.inverse { "^-1" } else { "" }))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for LoopWord {
    type Err = Error;

    /// Space-separated letters `r0`, `r2^-1`, …; `e` or an empty string is
    /// the empty word.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "e" {
            return Ok(Self::empty());
        }
        s.split_whitespace()
            .map(|tok| {
                let body = tok
                    .strip_prefix('r')
                    .ok_or_else(|| Error::Parse(format!("bad letter {tok:?}")))?;
                let (num, inverse) = match body.strip_suffix("^-1") {
                    Some(n) => (n, true),
                    None => (body, false),
                };
                let generator = num
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad generator in {tok:?}")))?;
                Ok(Letter { generator, inverse })
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

/// Matrix of a word: for ρ_{w₁}⋯ρ_{wₙ} this is M_{wₙ}⋯M_{w₁}.
pub fn word_matrix<S: Scalar>(gen: &Generators<S>, word: &LoopWord, basis: Basis) -> Result<SquareMatrix<S>> {
    let mats = generators(gen, basis)?;
    word_matrix_from(&mats, word)
}

/// [`word_matrix`] over precomputed generator matrices (index 0 = M₀).
pub fn word_matrix_from<S: Scalar>(mats: &[SquareMatrix<S>], word: &LoopWord) -> Result<SquareMatrix<S>> {
    let n = mats[0].size();
    let mut inverses: Vec<Option<SquareMatrix<S>>> = vec![None; mats.len()];
    let mut acc = SquareMatrix::identity(n);
    for l in word.letters() {
        let g = mats.get(l.generator).ok_or_else(|| {
            Error::InvalidArgument(format!("generator r{} outside 0..={}", l.generator, mats.len() - 1))
        })?;
        let m = if l.inverse {
            if inverses[l.generator].is_none() {
                inverses[l.generator] = Some(g.inverse()?);
            }
            inverses[l.generator].as_ref().expect("just computed")
        } else {
            g
        };
        acc = m.mul(&acc);
    }
    Ok(acc)
}

//! Dense square matrices and column vectors over a [`Scalar`].

use crate::error::{Error, Result};
use crate::scalars::Scalar;

#[derive(Clone, Debug)]
pub struct SquareMatrix<S> {
    n: usize,
    entries: Vec<S>,
}

#[derive(Clone, Debug)]
pub struct ColumnVector<S> {
    entries: Vec<S>,
}

impl<S: Scalar> SquareMatrix<S> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        SquareMatrix { n, entries }
    }

    pub fn try_from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Result<S>) -> Result<Self> {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j)?);
            }
        }
        Ok(SquareMatrix { n, entries })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("rows must all have length n".into()));
        }
        Ok(SquareMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| S::zero())
    }

    pub fn diagonal(diag: Vec<S>) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, d) in diag.into_iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: S) {
        self.entries[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> ColumnVector<S> {
        ColumnVector::new((0..self.n).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        SquareMatrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix size mismatch");
        SquareMatrix {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix size mismatch");
        SquareMatrix {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.mul(s))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix size mismatch");
        let n = self.n;
        Self::from_fn(n, |i, j| {
            let mut acc = S::zero();
            for k in 0..n {
                let a = self.get(i, k);
                let b = other.get(k, j);
                if !(S::EXACT && (a.is_zero() || b.is_zero())) {
                    acc = acc.add(&a.mul(b));
                }
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &ColumnVector<S>) -> ColumnVector<S> {
        assert_eq!(self.n, v.len(), "vector length mismatch");
        ColumnVector::new(
            (0..self.n)
                .map(|i| {
                    let mut acc = S::zero();
                    for (a, b) in self.row(i).iter().zip(v.entries()) {
                        if !(S::EXACT && (a.is_zero() || b.is_zero())) {
                            acc = acc.add(&a.mul(b));
                        }
                    }
                    acc
                })
                .collect(),
        )
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    /// Entrywise ∨-involution.
    pub fn dualize(&self) -> Self {
        self.map(S::dualize)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.n), |acc, _| acc.mul(self))
    }

    pub fn determinant(&self) -> S {
        S::determinant(self)
    }

    pub fn inverse(&self) -> Result<Self> {
        S::inverse(self)
    }

    pub fn rank(&self, tol: f64) -> Result<usize> {
        S::rank(self.n, self.n, &self.entries, tol)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Largest entry residual; 0 for an exactly zero exact matrix.
    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(S::residual).fold(0.0, f64::max)
    }

    /// The product as defined blockwise: block (i, j) of `A ⊗ B` is `A·b_ij`.
    /// Equal to the standard Kronecker product with the factors swapped.
    pub fn tensor(&self, b: &Self) -> Self {
        b.kron(self)
    }

    /// Standard Kronecker product: block (i, j) is `a_ij·B`.
    pub fn kron(&self, b: &Self) -> Self {
        let (na, nb) = (self.n, b.n);
        Self::from_fn(na * nb, |r, c| self.get(r / nb, c / nb).mul(b.get(r % nb, c % nb)))
    }

    /// 2×2 block matrix `[[tl, tr], [bl, br]]`.
    pub fn block2(tl: &Self, tr: &Self, bl: &Self, br: &Self) -> Self {
        let h = tl.n;
        Self::from_fn(2 * h, |i, j| {
            let src = match (i < h, j < h) {
                (true, true) => tl,
                (true, false) => tr,
                (false, true) => bl,
                (false, false) => br,
            };
            src.get(i % h, j % h).clone()
        })
    }

    /// Matrix whose columns are `cols`.
    pub fn from_columns(cols: &[ColumnVector<S>]) -> Result<Self> {
        let n = cols.len();
        if cols.iter().any(|c| c.len() != n) {
            return Err(Error::DimensionMismatch("columns must have length n".into()));
        }
        Ok(Self::from_fn(n, |i, j| cols[j].get(i).clone()))
    }
}

impl<S: Scalar> ColumnVector<S> {
    pub fn new(entries: Vec<S>) -> Self {
        ColumnVector { entries }
    }

    pub fn ones(n: usize) -> Self {
        Self::new(vec![S::one(); n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        Self::new((0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> &S {
        &self.entries[i]
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn dot(&self, other: &Self) -> S {
        assert_eq!(self.len(), other.len(), "vector length mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(S::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::new(self.entries.iter().map(|x| x.mul(s)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn dualize(&self) -> Self {
        Self::new(self.entries.iter().map(S::dualize).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(S::is_zero)
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(S::residual).fold(0.0, f64::max)
    }

    /// `v·ᵗw` as a square matrix.
    pub fn outer(&self, w: &Self) -> SquareMatrix<S> {
        SquareMatrix::from_fn(self.len(), |i, j| self.entries[i].mul(&w.entries[j]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{ExactScalar, PairedScalar};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn int_matrix(rows: &[&[i64]]) -> SquareMatrix<ExactScalar> {
        SquareMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| ExactScalar::from_int(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_tensor_identity() {
        let e2 = SquareMatrix::<ExactScalar>::identity(2);
        let e4 = e2.tensor(&e2);
        assert!(e4.sub(&SquareMatrix::identity(4)).entries().iter().all(|x| x.is_zero()));
    }

    #[test]
    fn tensor_layout() {
        let a = int_matrix(&[&[1, 2], &[3, 4]]);
        let b = int_matrix(&[&[0, 5], &[6, 7]]);
        let t = a.tensor(&b);
        // block (0,1) = A·b_01 = 5A
        assert_eq!(*t.get(0, 2), ExactScalar::from_int(5));
        assert_eq!(*t.get(1, 3), ExactScalar::from_int(20));
        // block (0,0) = A·0
        assert!(t.get(1, 1).is_zero());
    }

    #[test]
    fn exact_det_and_inverse() {
        let a = int_matrix(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(a.determinant(), ExactScalar::from_int(18));
        let inv = a.inverse().unwrap();
        let prod = a.mul(&inv);
        assert!(prod
            .sub(&SquareMatrix::identity(3))
            .entries()
            .iter()
            .all(|x| x.is_zero()));
        let sing = int_matrix(&[&[1, 2], &[2, 4]]);
        assert!(sing.determinant().is_zero());
        assert_eq!(sing.inverse().unwrap_err(), Error::Singular);
        assert_eq!(sing.rank(0.0).unwrap(), 1);
    }

    #[test]
    fn exact_det_needs_row_swap() {
        let a = int_matrix(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.determinant(), ExactScalar::from_int(-1));
    }

    fn shuffle(n1: usize, n2: usize) -> SquareMatrix<PairedScalar> {
        // maps index i*n2 + j to j*n1 + i
        SquareMatrix::from_fn(n1 * n2, |r, c| {
            let (i, j) = (c / n2, c % n2);
            if r == j * n1 + i {
                PairedScalar::one()
            } else {
                PairedScalar::zero()
            }
        })
    }

    fn numeric(vals: &[f64]) -> SquareMatrix<PairedScalar> {
        SquareMatrix::from_fn(2, |i, j| {
            let z = Complex64::new(vals[2 * i + j], vals[4 + 2 * i + j]);
            PairedScalar::new(z, z.conj())
        })
    }

    proptest! {
        #[test]
        fn tensor_is_shuffled_kronecker(vals in proptest::collection::vec(-3.0f64..3.0, 16)) {
            let a = numeric(&vals[..8]);
            let b = numeric(&vals[8..]);
            let s = shuffle(2, 2);
            let via_shuffle = s.mul(&a.kron(&b)).mul(&s.transpose());
            let diff = a.tensor(&b).sub(&via_shuffle);
            prop_assert!(diff.max_residual() < 1e-12);
        }
    }
}

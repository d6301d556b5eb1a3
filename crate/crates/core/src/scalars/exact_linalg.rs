//! Fraction-free (Bareiss) elimination over the exact field.
//!
//! Every update `(p·a_ij − a_ik·a_kj) / p_prev` is divisible by the
//! previous pivot; [`ExactScalar::div_cancel`] recovers that division as
//! factor cancellation, which keeps entries at minor size.

use rayon::prelude::*;

use super::exact::ExactScalar;
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

fn rows_of(m: &SquareMatrix<ExactScalar>) -> Vec<Vec<ExactScalar>> {
    (0..m.size()).map(|i| m.row(i).to_vec()).collect()
}

/// One Bareiss step below pivot `(r, c)` on columns `c+1..`.
fn eliminate(a: &mut [Vec<ExactScalar>], r: usize, c: usize, prev: &ExactScalar) {
    let pivot_row = a[r].clone();
    let pivot = pivot_row[c].clone();
    let cols = pivot_row.len();
    a[r + 1..].par_iter_mut().for_each(|row| {
        let factor = row[c].clone();
        for j in c + 1..cols {
            let num = if factor.is_zero() {
                pivot.mul(&row[j])
            } else {
                pivot.mul(&row[j]).sub(&factor.mul(&pivot_row[j]))
            };
            row[j] = num.div_cancel(prev).expect("Bareiss pivot is nonzero");
        }
        row[c] = ExactScalar::zero();
    });
}

fn find_pivot(a: &[Vec<ExactScalar>], from: usize, c: usize) -> Option<usize> {
    (from..a.len()).find(|&i| !a[i][c].is_zero())
}

pub fn determinant(m: &SquareMatrix<ExactScalar>) -> ExactScalar {
    let n = m.size();
    if n == 0 {
        return ExactScalar::one();
    }
    let mut a = rows_of(m);
    let mut negate = false;
    let mut prev = ExactScalar::one();
    for k in 0..n {
        let Some(p) = find_pivot(&a, k, k) else {
            return ExactScalar::zero();
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        if k + 1 < n {
            eliminate(&mut a, k, k, &prev);
            prev = a[k][k].clone();
        }
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        det.neg()
    } else {
        det
    }
}

pub fn rank(rows: usize, cols: usize, entries: &[ExactScalar]) -> usize {
    let mut a: Vec<Vec<ExactScalar>> = entries.chunks(cols.max(1)).take(rows).map(|r| r.to_vec()).collect();
    let mut r = 0;
    let mut prev = ExactScalar::one();
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = find_pivot(&a, r, c) else {
            continue;
        };
        a.swap(p, r);
        eliminate(&mut a, r, c, &prev);
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

pub fn inverse(m: &SquareMatrix<ExactScalar>) -> Result<SquareMatrix<ExactScalar>> {
    let n = m.size();
    let mut a: Vec<Vec<ExactScalar>> = (0..n)
        .map(|i| {
            let mut row = m.row(i).to_vec();
            row.extend((0..n).map(|j| {
                if i == j {
                    ExactScalar::one()
                } else {
                    ExactScalar::zero()
                }
            }));
            row
        })
        .collect();
    let mut prev = ExactScalar::one();
    for k in 0..n {
        let p = find_pivot(&a, k, k).ok_or(Error::Singular)?;
        a.swap(p, k);
        eliminate(&mut a, k, k, &prev);
        prev = a[k][k].clone();
    }
    // U·X = B with U = a[.., ..n], B = a[.., n..]; solve for Y = d·X, d = U_{n−1,n−1}.
    let d = a[n - 1][n - 1].clone();
    let mut y: Vec<Vec<ExactScalar>> = vec![vec![ExactScalar::zero(); n]; n];
    let cols: Vec<Vec<ExactScalar>> = (0..n)
        .into_par_iter()
        .map(|col| {
            let mut x = vec![ExactScalar::zero(); n];
            for i in (0..n).rev() {
                let mut acc = d.mul(&a[i][n + col]);
                for j in i + 1..n {
                    if !a[i][j].is_zero() {
                        acc = acc.sub(&a[i][j].mul(&x[j]));
                    }
                }
                x[i] = acc.div_cancel(&a[i][i]).expect("pivot is nonzero");
            }
            x
        })
        .collect();
    for (col, x) in cols.into_iter().enumerate() {
        for (i, v) in x.into_iter().enumerate() {
            y[i][col] = v;
        }
    }
    Ok(SquareMatrix::from_fn(n, |i, j| {
        y[i][j].div_cancel(&d).expect("determinant is nonzero")
    }))
}

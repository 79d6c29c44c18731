//! Exact rational linear algebra: scalars, dense matrices, and subspaces in
//! canonical reduced row echelon form.

mod matrix;
mod scalar;
mod subspace;

pub use matrix::{format_vector, Matrix};
pub use scalar::{format_scalar, frac, int, parse_scalar, Scalar, ScalarParseError};
pub use subspace::Subspace;

pub(crate) use scalar::abs;

use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subspace is not contained in the superspace; witness {}", format_vector(.witness))]
    NotContained { witness: Vec<Scalar> },
}

/// Result of row-reducing a matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub rank: usize,
    /// Pivot column of each nonzero row of the echelon form.
    pub pivots: Vec<usize>,
    pub row_space: Subspace,
    pub kernel: Subspace,
}

/// Reduced row echelon form of `m` together with its pivot columns.
pub(crate) fn rref(m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(p, r);
        let pivot = a[(r, c)].clone();
        if !pivot.is_one() {
            for j in c..cols {
                a[(r, j)] /= &pivot;
            }
        }
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let factor = a[(i, c)].clone();
            for j in c..cols {
                if a[(r, j)].is_zero() {
                    continue;
                }
                let sub = &factor * &a[(r, j)];
                a[(i, j)] -= sub;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub(crate) fn canonical_span(cols: usize, vectors: Vec<Vec<Scalar>>) -> Subspace {
    let m = Matrix::from_rows_with_cols(vectors, cols).expect("vectors have ambient length");
    let (e, pivots) = rref(&m);
    let rows = (0..pivots.len()).map(|i| e.row(i).to_vec()).collect();
    Subspace::from_canonical(cols, rows, pivots)
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).1.len()
}

/// Rank, canonical row space and canonical kernel of `m`.
pub fn reduce(m: &Matrix) -> Reduction {
    let (e, pivots) = rref(m);
    let cols = m.cols();
    let rank = pivots.len();
    let rows: Vec<Vec<Scalar>> = (0..rank).map(|i| e.row(i).to_vec()).collect();
    let row_space = Subspace::from_canonical(cols, rows, pivots.clone());

    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let kernel_vectors: Vec<Vec<Scalar>> = (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Scalar::zero(); cols];
            v[free] = Scalar::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -e[(i, free)].clone();
            }
            v
        })
        .collect();
    let kernel = canonical_span(cols, kernel_vectors);
    debug_assert_eq!(rank + kernel.dim(), cols);
    Reduction { rank, pivots, row_space, kernel }
}

/// Solves `m x = b`, returning one solution if any exists.
pub fn solve(m: &Matrix, b: &[Scalar]) -> Result<Option<Vec<Scalar>>, LinalgError> {
    if b.len() != m.rows() {
        return Err(LinalgError::DimensionMismatch { expected: m.rows(), found: b.len() });
    }
    let mut aug = Matrix::zeros(m.rows(), m.cols() + 1);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, m.cols())] = b[i].clone();
    }
    let (e, pivots) = rref(&aug);
    if pivots.last() == Some(&m.cols()) {
        return Ok(None);
    }
    let mut x = vec![Scalar::zero(); m.cols()];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = e[(i, m.cols())].clone();
    }
    Ok(Some(x))
}

pub fn subspace_sum(a: &Subspace, b: &Subspace) -> Result<Subspace, LinalgError> {
    a.sum(b)
}

pub fn subspace_intersect(a: &Subspace, b: &Subspace) -> Result<Subspace, LinalgError> {
    a.intersect(b)
}

pub fn codim_in(sub: &Subspace, sup: &Subspace) -> Result<usize, LinalgError> {
    sub.codim_in(sup)
}

pub(crate) fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn unit(n: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); n];
    v[i] = Scalar::one();
    v
}

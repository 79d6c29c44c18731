//! The computable infinite-dimensional model.
//!
//! Operators are banded with eventually constant diagonals and act on
//! sequences indexed by `Z`; half-spaces are window-tail spaces. For such a
//! pair only finitely many generators of `Y` can map outside the tail: the
//! coordinates `e_i` with `c - u < i <= c` (`u` the upward reach of `T`) and
//! the window vectors. Every quantity below is computed from their images.

mod diagonal;
mod extract;
mod operator;
mod space;
mod vector;

pub use diagonal::DiagonalSpec;
pub use extract::{extract_invariant, Move, MoveKind, Outcome, ReductionTrace, DEFAULT_MAX_DEPTH};
pub use operator::BandedOperator;
pub use space::{echelon_basis, WindowTailSpace};
pub use vector::SparseVec;

use thiserror::Error;

use crate::linalg::{self, Matrix, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("invalid diagonal: {0}")]
    InvalidDiagonal(String),
    #[error("window vector has support at index {index}, at or below cutoff {cutoff}")]
    WindowBelowCutoff { index: i64, cutoff: i64 },
    #[error("space is not contained in the superspace; witness {witness}")]
    NotContained { witness: SparseVec },
}

/// Generators of `Y` whose images can leave the tail.
pub fn contributing_generators(t: &BandedOperator, y: &WindowTailSpace) -> Vec<SparseVec> {
    let c = y.cutoff();
    let u = t.upward_reach();
    let mut gens: Vec<SparseVec> = (c - u + 1..=c).map(SparseVec::unit).collect();
    gens.extend(y.window_vectors());
    gens
}

/// Quotient classes `q(T g)` of the contributing generators, represented by
/// their residues above the cutoff modulo the window.
fn quotient_images(t: &BandedOperator, y: &WindowTailSpace, gens: &[SparseVec]) -> Vec<SparseVec> {
    gens.iter().map(|g| y.residue(&t.apply(g))).collect()
}

/// Dense column matrix of sparse vectors over the union of their supports.
pub(crate) fn column_matrix(vectors: &[SparseVec]) -> Matrix {
    let lo = vectors.iter().filter_map(SparseVec::min_index).min();
    let hi = vectors.iter().filter_map(SparseVec::max_index).max();
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Matrix::zeros(0, vectors.len());
    };
    let cols: Vec<Vec<Scalar>> = vectors.iter().map(|v| v.dense(lo, hi)).collect();
    Matrix::from_columns((hi - lo + 1) as usize, &cols).expect("columns share a length")
}

pub(crate) fn sparse_rank(vectors: &[SparseVec]) -> usize {
    linalg::rank(&column_matrix(vectors))
}

/// `d(Y, T)`, always finite in this model.
pub fn seq_error_dimension(t: &BandedOperator, y: &WindowTailSpace) -> usize {
    let gens = contributing_generators(t, y);
    sparse_rank(&quotient_images(t, y, &gens))
}

pub fn seq_is_invariant(t: &BandedOperator, y: &WindowTailSpace) -> bool {
    seq_error_dimension(t, y) == 0
}

/// Minimal common error space `G` with `TY ⊆ Y ⊕ G` for every `T` in `ts`,
/// chosen inside the images `T(Y)`. Returns `dim G` and a canonical basis.
pub fn seq_minimal_error_collection(ts: &[BandedOperator], y: &WindowTailSpace) -> (usize, Vec<SparseVec>) {
    let mut images = Vec::new();
    let mut residues = Vec::new();
    for t in ts {
        for g in contributing_generators(t, y) {
            let image = t.apply(&g);
            residues.push(y.residue(&image));
            images.push(image);
        }
    }
    let pivots = linalg::reduce(&column_matrix(&residues)).pivots;
    let chosen = pivots.iter().map(|&j| images[j].clone());
    (pivots.len(), echelon_basis(chosen))
}

/// `D_T(Y) = {y ∈ Y : Ty ∈ Y}`, with cutoff `c - u`.
pub fn seq_going_down(t: &BandedOperator, y: &WindowTailSpace) -> WindowTailSpace {
    let gens = contributing_generators(t, y);
    let images = quotient_images(t, y, &gens);
    let kernel = linalg::reduce(&column_matrix(&images)).kernel;
    let vectors = kernel.basis().iter().map(|coeffs| {
        let mut v = SparseVec::zero();
        for (c, g) in coeffs.iter().zip(&gens) {
            v.add_scaled(g, c);
        }
        v
    });
    WindowTailSpace::new(y.cutoff() - t.upward_reach(), vectors)
        .expect("generators lie above the lowered cutoff")
}

/// `U_T(Y) = Y + TY`, with the same cutoff.
pub fn seq_going_up(t: &BandedOperator, y: &WindowTailSpace) -> WindowTailSpace {
    let gens = contributing_generators(t, y);
    let mut vectors = y.window_vectors();
    vectors.extend(gens.iter().map(|g| t.apply(g)));
    WindowTailSpace::from_vectors(y.cutoff(), vectors)
}

/// `[d(Y, T^m)]` for `m = 1..=m_max`.
pub fn power_error_profile(t: &BandedOperator, y: &WindowTailSpace, m_max: usize) -> Vec<usize> {
    let mut power = BandedOperator::identity();
    (1..=m_max)
        .map(|_| {
            power = t.compose(&power);
            seq_error_dimension(&power, y)
        })
        .collect()
}

use std::fmt;

use num_traits::{One, Zero};

use super::matrix::{format_vector, Matrix};
use super::scalar::Scalar;
use super::{is_zero_vec, reduce, rref, LinalgError};

/// A subspace of `Q^n`, stored as the rows of its reduced row echelon form.
///
/// Two values are equal exactly when they span the same subspace.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self::coordinate(ambient_dim, 0..ambient_dim)
    }

    /// Span of the listed coordinate vectors.
    pub fn coordinate(ambient_dim: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let vectors: Vec<Vec<Scalar>> = indices.into_iter().map(|i| super::unit(ambient_dim, i)).collect();
        Self::span(ambient_dim, &vectors).expect("coordinate vectors have ambient length")
    }

    pub fn span(ambient_dim: usize, vectors: &[Vec<Scalar>]) -> Result<Self, LinalgError> {
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(LinalgError::DimensionMismatch { expected: ambient_dim, found: v.len() });
            }
        }
        Ok(super::canonical_span(ambient_dim, vectors.to_vec()))
    }

    pub(crate) fn from_canonical(ambient_dim: usize, basis: Vec<Vec<Scalar>>, pivots: Vec<usize>) -> Self {
        Self { ambient_dim, basis, pivots }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates outside the pivot set; these index a basis of the quotient.
    pub fn complement_indices(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient_dim];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient_dim).filter(|&i| !is_pivot[i]).collect()
    }

    fn check_len(&self, v: &[Scalar]) -> Result<(), LinalgError> {
        if v.len() != self.ambient_dim {
            return Err(LinalgError::DimensionMismatch { expected: self.ambient_dim, found: v.len() });
        }
        Ok(())
    }

    fn check_same_ambient(&self, other: &Subspace) -> Result<(), LinalgError> {
        if other.ambient_dim != self.ambient_dim {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        Ok(())
    }

    /// Remainder of `v` after clearing every pivot coordinate. Zero iff `v`
    /// lies in the subspace.
    pub fn remainder(&self, v: &[Scalar]) -> Result<Vec<Scalar>, LinalgError> {
        self.check_len(v)?;
        let mut r = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if r[p].is_zero() {
                continue;
            }
            let c = r[p].clone();
            for (x, b) in r.iter_mut().zip(row) {
                if !b.is_zero() {
                    *x -= &c * b;
                }
            }
        }
        Ok(r)
    }

    pub fn contains(&self, v: &[Scalar]) -> Result<bool, LinalgError> {
        Ok(is_zero_vec(&self.remainder(v)?))
    }

    /// Image of `v` under the quotient map onto the complement coordinates.
    pub fn quotient_coords(&self, v: &[Scalar]) -> Result<Vec<Scalar>, LinalgError> {
        let r = self.remainder(v)?;
        Ok(self.complement_indices().into_iter().map(|i| r[i].clone()).collect())
    }

    /// Matrix of the quotient map `Q^n -> Q^n / Y` in complement coordinates.
    pub fn quotient_matrix(&self) -> Matrix {
        let comp = self.complement_indices();
        let mut q = Matrix::zeros(comp.len(), self.ambient_dim);
        for (a, &j) in comp.iter().enumerate() {
            q[(a, j)] = Scalar::one();
            for (row, &p) in self.basis.iter().zip(&self.pivots) {
                if !row[j].is_zero() {
                    q[(a, p)] = -row[j].clone();
                }
            }
        }
        q
    }

    /// Coefficients of `v` in the canonical basis, if `v` is in the subspace.
    pub fn coefficients(&self, v: &[Scalar]) -> Result<Option<Vec<Scalar>>, LinalgError> {
        if !self.contains(v)? {
            return Ok(None);
        }
        Ok(Some(self.pivots.iter().map(|&p| v[p].clone()).collect()))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_same_ambient(other)?;
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient_dim, &rows)
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_same_ambient(other)?;
        // a in ker of (coefficients -> quotient by other) gives sum a_i basis_i in both.
        let images: Vec<Vec<Scalar>> =
            self.basis.iter().map(|b| other.quotient_coords(b)).collect::<Result<_, _>>()?;
        let q = Matrix::from_columns(self.ambient_dim - other.dim(), &images)?;
        let kernel = reduce(&q).kernel;
        let vectors: Vec<Vec<Scalar>> = kernel.basis().iter().map(|c| self.combine(c)).collect();
        Subspace::span(self.ambient_dim, &vectors)
    }

    /// Linear combination of the canonical basis with the given coefficients.
    pub fn combine(&self, coefficients: &[Scalar]) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.ambient_dim];
        for (c, row) in coefficients.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (x, b) in v.iter_mut().zip(row) {
                if !b.is_zero() {
                    *x += c * b;
                }
            }
        }
        v
    }

    pub fn is_subspace_of(&self, sup: &Subspace) -> Result<bool, LinalgError> {
        self.check_same_ambient(sup)?;
        for b in &self.basis {
            if !sup.contains(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `dim(sup) - dim(self)`, after checking containment.
    pub fn codim_in(&self, sup: &Subspace) -> Result<usize, LinalgError> {
        self.check_same_ambient(sup)?;
        for b in &self.basis {
            if !sup.contains(b)? {
                return Err(LinalgError::NotContained { witness: b.clone() });
            }
        }
        Ok(sup.dim() - self.dim())
    }

    /// Basis vectors as the rows of a matrix.
    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_rows_with_cols(self.basis.clone(), self.ambient_dim).expect("canonical rows have ambient length")
    }

    /// Checks the reduced row echelon invariants of the stored basis.
    pub fn is_canonical(&self) -> bool {
        let (e, pivots) = rref(&self.to_matrix());
        pivots == self.pivots && e.to_rows() == self.basis
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(Q^{}) ", self.ambient_dim)?;
        f.debug_list().entries(self.basis.iter().map(|r| format_vector(r))).finish()
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.basis.iter().map(|r| format_vector(r)).collect();
        write!(f, "span{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int;

    fn v(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn coordinate_sum() {
        let a = Subspace::coordinate(3, [0]);
        let b = Subspace::coordinate(3, [1]);
        assert_eq!(a.sum(&b).unwrap(), Subspace::coordinate(3, [0, 1]));
    }

    #[test]
    fn sum_is_idempotent() {
        let a = Subspace::span(4, &[v(&[1, 2, 0, 3]), v(&[0, 1, 1, 1])]).unwrap();
        assert_eq!(a.sum(&a).unwrap(), a);
    }

    #[test]
    fn coordinate_intersection() {
        let a = Subspace::coordinate(3, [0, 1]);
        let b = Subspace::coordinate(3, [1, 2]);
        assert_eq!(a.intersect(&b).unwrap(), Subspace::coordinate(3, [1]));
        assert_eq!(a.intersect(&Subspace::zero(3)).unwrap(), Subspace::zero(3));
    }

    #[test]
    fn mismatched_ambient() {
        let a = Subspace::zero(2);
        let b = Subspace::zero(3);
        assert!(matches!(a.sum(&b), Err(LinalgError::DimensionMismatch { .. })));
        assert!(matches!(a.intersect(&b), Err(LinalgError::DimensionMismatch { .. })));
    }

    #[test]
    fn codim_and_witness() {
        let e1 = Subspace::coordinate(3, [0]);
        assert_eq!(e1.codim_in(&Subspace::full(3)).unwrap(), 2);
        assert_eq!(e1.codim_in(&e1).unwrap(), 0);
        let err = Subspace::full(3).codim_in(&e1).unwrap_err();
        match err {
            LinalgError::NotContained { witness } => assert!(!e1.contains(&witness).unwrap()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn quotient_matrix_matches_quotient_coords() {
        let y = Subspace::span(4, &[v(&[1, 2, 0, 3]), v(&[0, 0, 1, -1])]).unwrap();
        let q = y.quotient_matrix();
        for x in [v(&[1, 1, 1, 1]), v(&[0, 3, -2, 5]), v(&[1, 2, 0, 3])] {
            assert_eq!(q.mul_vec(&x).unwrap(), y.quotient_coords(&x).unwrap());
        }
        assert!(y.is_canonical());
    }

    #[test]
    fn coefficients_reconstruct() {
        let y = Subspace::span(3, &[v(&[1, 1, 0]), v(&[0, 1, 1])]).unwrap();
        let x = v(&[2, 5, 3]);
        let c = y.coefficients(&x).unwrap().unwrap();
        assert_eq!(y.combine(&c), x);
        assert_eq!(y.coefficients(&v(&[1, 0, 0])).unwrap(), None);
    }
}

//! Almost-invariance data for matrices acting on `Q^n`.
//!
//! For a subspace `Y` and an operator `T`, the error dimension `d(Y, T)` is
//! the smallest `dim F` with `TY ⊆ Y + F`. It equals the rank of the quotient
//! map `Q^n -> Q^n / Y` composed with `T` and restricted to `Y`; every
//! routine here reduces to that matrix.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::{self, abs, format_vector, reduce, LinalgError, Matrix, Scalar, Subspace};
use crate::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiniteError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("operator matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("operator collection is empty")]
    EmptyCollection,
    #[error("expected {expected} vectors to pair with, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("the u vectors are linearly dependent; coefficients {}", format_vector(.coefficients))]
    DependentVectors { coefficients: Vec<Scalar> },
    #[error("span of the u vectors meets Y in {}", format_vector(.witness))]
    MeetsSubspace { witness: Vec<Scalar> },
}

/// A square matrix acting on column vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinOperator {
    matrix: Matrix,
}

impl FinOperator {
    pub fn new(matrix: Matrix) -> Result<Self, FiniteError> {
        if !matrix.is_square() {
            return Err(FiniteError::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        Ok(Self { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: Matrix::identity(n) }
    }

    pub fn zero(n: usize) -> Self {
        Self { matrix: Matrix::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[Scalar]) -> Result<Vec<Scalar>, FiniteError> {
        Ok(self.matrix.mul_vec(v)?)
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &FinOperator) -> Result<FinOperator, FiniteError> {
        Ok(FinOperator { matrix: self.matrix.mul(&rhs.matrix)? })
    }

    pub fn add(&self, rhs: &FinOperator) -> Result<FinOperator, FiniteError> {
        Ok(FinOperator { matrix: self.matrix.add(&rhs.matrix)? })
    }

    pub fn scale(&self, c: &Scalar) -> FinOperator {
        FinOperator { matrix: self.matrix.scale(c) }
    }

    pub fn power(&self, m: u32) -> FinOperator {
        let mut out = FinOperator::identity(self.dim());
        for _ in 0..m {
            out = out.compose(self).expect("square operators of equal size");
        }
        out
    }

    fn check(&self, y: &Subspace) -> Result<(), FiniteError> {
        if y.ambient_dim() != self.dim() {
            return Err(LinalgError::DimensionMismatch { expected: self.dim(), found: y.ambient_dim() }.into());
        }
        Ok(())
    }

    /// `T y_i` for the canonical basis `y_i` of `y`.
    pub fn image_of_basis(&self, y: &Subspace) -> Result<Vec<Vec<Scalar>>, FiniteError> {
        self.check(y)?;
        y.basis().iter().map(|b| self.apply(b)).collect()
    }
}

impl fmt::Debug for FinOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinOperator({:?})", self.matrix)
    }
}

/// The quotient-composed matrix: column `i` is `q(T y_i)`.
pub fn quotient_composed(t: &FinOperator, y: &Subspace) -> Result<Matrix, FiniteError> {
    let images = t.image_of_basis(y)?;
    let cols: Vec<Vec<Scalar>> = images.iter().map(|v| y.quotient_coords(v)).collect::<Result<_, _>>()?;
    Ok(Matrix::from_columns(y.ambient_dim() - y.dim(), &cols)?)
}

/// `d(Y, T)`: zero iff `TY ⊆ Y`.
pub fn error_dimension(t: &FinOperator, y: &Subspace) -> Result<usize, FiniteError> {
    let q = quotient_composed(t, y)?;
    Ok(linalg::rank(&q))
}

/// A minimal error space with a certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorWitness {
    pub d: usize,
    pub error_space: Subspace,
    /// Pairs `(y, P T y)` for every basis vector `y` of `Y` and every operator
    /// `T`, where `P` projects `Y ⊕ F` onto `F` along `Y`.
    pub projection_images: Vec<(Vec<Scalar>, Vec<Scalar>)>,
}

/// Minimal `F` with `TY ⊆ Y ⊕ F`, chosen inside `TY`.
pub fn minimal_error_subspace(t: &FinOperator, y: &Subspace) -> Result<ErrorWitness, FiniteError> {
    minimal_error_collection(std::slice::from_ref(t), y)
}

/// Minimal common `G` with `TY ⊆ Y ⊕ G` for every `T` in `ts`.
///
/// `G` is spanned by images `T y_i` whose quotient classes form a basis of
/// the span of all quotient images.
pub fn minimal_error_collection(ts: &[FinOperator], y: &Subspace) -> Result<ErrorWitness, FiniteError> {
    if ts.is_empty() {
        return Err(FiniteError::EmptyCollection);
    }
    let n = y.ambient_dim();
    let mut images = Vec::new();
    for t in ts {
        images.extend(t.image_of_basis(y)?);
    }
    let quotients: Vec<Vec<Scalar>> = images.iter().map(|v| y.quotient_coords(v)).collect::<Result<_, _>>()?;
    let qmat = Matrix::from_columns(n - y.dim(), &quotients)?;
    let red = reduce(&qmat);
    let chosen: Vec<Vec<Scalar>> = red.pivots.iter().map(|&j| images[j].clone()).collect();
    let error_space = Subspace::span(n, &chosen)?;

    // P x = sum c_j g_j where q(x) = sum c_j q(g_j).
    let chosen_q: Vec<Vec<Scalar>> = red.pivots.iter().map(|&j| quotients[j].clone()).collect();
    let basis_q = Matrix::from_columns(n - y.dim(), &chosen_q)?;
    let mut projection_images = Vec::with_capacity(images.len());
    for (k, q) in quotients.iter().enumerate() {
        let coeffs = linalg::solve(&basis_q, q)?.expect("quotient image lies in the span of the chosen classes");
        let mut p = vec![Scalar::zero(); n];
        for (c, g) in coeffs.iter().zip(&chosen) {
            for (x, gi) in p.iter_mut().zip(g) {
                *x += c * gi;
            }
        }
        // images are laid out operator by operator, one per basis vector
        projection_images.push((y.basis()[k % y.dim()].clone(), p));
    }
    Ok(ErrorWitness { d: red.rank, error_space, projection_images })
}

/// `D_T(Y) = {y ∈ Y : Ty ∈ Y}`.
pub fn going_down(t: &FinOperator, y: &Subspace) -> Result<Subspace, FiniteError> {
    let q = quotient_composed(t, y)?;
    let kernel = reduce(&q).kernel;
    let vectors: Vec<Vec<Scalar>> = kernel.basis().iter().map(|c| y.combine(c)).collect();
    Ok(Subspace::span(y.ambient_dim(), &vectors)?)
}

/// `U_T(Y) = Y + TY`.
pub fn going_up(t: &FinOperator, y: &Subspace) -> Result<Subspace, FiniteError> {
    let images = t.image_of_basis(y)?;
    let image_space = Subspace::span(y.ambient_dim(), &images)?;
    Ok(y.sum(&image_space)?)
}

/// Whether `vectors` are linearly independent modulo `y`.
pub fn independent_mod(vectors: &[Vec<Scalar>], y: &Subspace) -> Result<bool, FiniteError> {
    let qs: Vec<Vec<Scalar>> = vectors.iter().map(|v| y.quotient_coords(v)).collect::<Result<_, _>>()?;
    let m = Matrix::from_columns(y.ambient_dim() - y.dim(), &qs)?;
    Ok(linalg::rank(&m) == vectors.len())
}

/// `v_i + α u_i`.
pub fn shifted(us: &[Vec<Scalar>], vs: &[Vec<Scalar>], alpha: &Scalar) -> Vec<Vec<Scalar>> {
    us.iter()
        .zip(vs)
        .map(|(u, v)| v.iter().zip(u).map(|(vi, ui)| vi + alpha * ui).collect())
        .collect()
}

/// The rational `α` for which `{v_i + α u_i}` fails to be independent
/// modulo `y`, ascending.
///
/// Candidates are the rational roots of `det(A + αI)`, where `A` holds the
/// coordinates of the classes of `v_i` in a basis of `(Y + span{u, v}) / Y`
/// that starts with the classes of `u_i`. Each candidate is then confirmed by
/// a rank check.
pub fn bad_alphas(us: &[Vec<Scalar>], vs: &[Vec<Scalar>], y: &Subspace) -> Result<Vec<Scalar>, FiniteError> {
    if us.len() != vs.len() {
        return Err(FiniteError::CountMismatch { expected: us.len(), found: vs.len() });
    }
    let n = y.ambient_dim();
    let qdim = n - y.dim();
    let big_n = us.len();
    if big_n == 0 {
        return Ok(Vec::new());
    }
    let xs: Vec<Vec<Scalar>> = us.iter().map(|u| y.quotient_coords(u)).collect::<Result<_, _>>()?;
    let zs: Vec<Vec<Scalar>> = vs.iter().map(|v| y.quotient_coords(v)).collect::<Result<_, _>>()?;

    let xmat = Matrix::from_columns(qdim, &xs)?;
    let xred = reduce(&xmat);
    if xred.rank < big_n {
        let c = xred.kernel.basis()[0].clone();
        let umat = Matrix::from_columns(n, us)?;
        let combo = umat.mul_vec(&c)?;
        if linalg::is_zero_vec(&combo) {
            return Err(FiniteError::DependentVectors { coefficients: c });
        }
        return Err(FiniteError::MeetsSubspace { witness: combo });
    }

    // Basis b of G = (Y + F) / Y extending the classes of u.
    let mut basis = xs.clone();
    for z in &zs {
        let mut trial = basis.clone();
        trial.push(z.clone());
        if linalg::rank(&Matrix::from_columns(qdim, &trial)?) == trial.len() {
            basis = trial;
        }
    }
    let m = basis.len();
    let bmat = Matrix::from_columns(qdim, &basis)?;
    let mut a = Matrix::zeros(m, m);
    for (i, z) in zs.iter().enumerate() {
        let coords = linalg::solve(&bmat, z)?.expect("z lies in G by construction");
        for (j, c) in coords.into_iter().enumerate() {
            a[(i, j)] = c;
        }
    }

    let points: Vec<(Scalar, Scalar)> = (0..=m as i64)
        .map(|k| {
            let alpha = linalg::int(k);
            let shifted = a.add(&Matrix::identity(m).scale(&alpha)).expect("same shape");
            (alpha, shifted.determinant())
        })
        .collect();
    let det_poly = Polynomial::interpolate(&points);
    debug_assert_eq!(det_poly.degree(), Some(m));

    let mut bad = Vec::new();
    for alpha in det_poly.rational_roots() {
        if !independent_mod(&shifted(us, vs, &alpha), y)? {
            bad.push(alpha);
        }
    }
    Ok(bad)
}

/// How far an operator may be perturbed entrywise before `d` can drop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StabilityRadius {
    /// `d = 0`, so no perturbation can lower it.
    Unbounded,
    Finite(Scalar),
}

impl fmt::Display for StabilityRadius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabilityRadius::Unbounded => write!(f, "unbounded"),
            StabilityRadius::Finite(r) => write!(f, "{}", linalg::format_scalar(r)),
        }
    }
}

fn max_row_abs_sum(m: &Matrix) -> Scalar {
    (0..m.rows())
        .map(|i| m.row(i).iter().fold(Scalar::zero(), |acc, x| acc + abs(x)))
        .max()
        .unwrap_or_else(Scalar::zero)
}

/// A `δ > 0` such that `d(Y, T + E) ≥ d(Y, T)` whenever every entry of `E`
/// has absolute value below `δ`.
///
/// With `Q = q T B` (quotient matrix `q`, basis columns `B`) and a nonsingular
/// `d x d` minor `M` of `Q` on rows `R` and columns `C`, the perturbed minor is
/// `M + q_R E B_C`. It stays nonsingular while
/// `‖M⁻¹‖∞ · d · max_R‖q_r‖₁ · max_C‖b_c‖₁ · δ ≤ 1`.
pub fn stability_radius(t: &FinOperator, y: &Subspace) -> Result<StabilityRadius, FiniteError> {
    let q = quotient_composed(t, y)?;
    let col_red = reduce(&q);
    let d = col_red.rank;
    if d == 0 {
        return Ok(StabilityRadius::Unbounded);
    }
    let cols = col_red.pivots;
    let rows = reduce(&q.transpose()).pivots;
    let minor = q.select(&rows, &cols);
    let inv = minor.inverse().expect("pivot rows and columns give a nonsingular minor");

    let qmap = y.quotient_matrix();
    let qrows = qmap.select(&rows, &(0..qmap.cols()).collect::<Vec<_>>());
    let basis_cols = y.to_matrix().select(&cols, &(0..y.ambient_dim()).collect::<Vec<_>>());

    let bound = max_row_abs_sum(&inv)
        * linalg::int(d as i64)
        * max_row_abs_sum(&qrows)
        * max_row_abs_sum(&basis_cols);
    Ok(StabilityRadius::Finite(Scalar::one() / bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frac, int, unit};

    /// The two-operator example truncated to e₋₁..e₃ (indices 0..=4).
    fn example() -> (FinOperator, FinOperator, Subspace) {
        let mut t = Matrix::zeros(5, 5);
        t[(2, 1)] = int(1); // T e0 = e1
        t[(3, 0)] = int(1); // T e-1 = e2
        let mut s = Matrix::zeros(5, 5);
        s[(4, 1)] = int(1); // S e0 = e3
        let y = Subspace::coordinate(5, [0, 1]);
        (FinOperator::new(t).unwrap(), FinOperator::new(s).unwrap(), y)
    }

    #[test]
    fn identity_has_zero_error() {
        let y = Subspace::span(4, &[vec![int(1), int(2), int(0), int(0)]]).unwrap();
        assert_eq!(error_dimension(&FinOperator::identity(4), &y).unwrap(), 0);
        let w = minimal_error_subspace(&FinOperator::identity(4), &y).unwrap();
        assert_eq!(w.error_space, Subspace::zero(4));
    }

    #[test]
    fn truncated_example() {
        let (t, s, y) = example();
        assert_eq!(error_dimension(&t, &y).unwrap(), 2);
        assert_eq!(error_dimension(&s, &y).unwrap(), 1);
        let w = minimal_error_subspace(&t, &y).unwrap();
        assert_eq!(w.error_space, Subspace::coordinate(5, [2, 3]));
        let g = minimal_error_collection(&[t.clone(), s.clone()], &y).unwrap();
        assert_eq!(g.d, 3);
        assert_eq!(g.error_space, Subspace::coordinate(5, [2, 3, 4]));
        assert_eq!(going_down(&t, &y).unwrap(), Subspace::zero(5));
        assert_eq!(going_up(&t, &y).unwrap(), Subspace::coordinate(5, [0, 1, 2, 3]));
    }

    #[test]
    fn degenerate_subspaces() {
        let (t, _, _) = example();
        assert_eq!(error_dimension(&t, &Subspace::full(5)).unwrap(), 0);
        assert_eq!(error_dimension(&t, &Subspace::zero(5)).unwrap(), 0);
        assert_eq!(going_down(&t, &Subspace::zero(5)).unwrap(), Subspace::zero(5));
    }

    #[test]
    fn dimension_mismatch() {
        let err = error_dimension(&FinOperator::identity(3), &Subspace::zero(4)).unwrap_err();
        assert!(matches!(err, FiniteError::Linalg(LinalgError::DimensionMismatch { .. })));
        assert!(matches!(minimal_error_collection(&[], &Subspace::zero(2)), Err(FiniteError::EmptyCollection)));
        assert!(matches!(
            FinOperator::new(Matrix::zeros(2, 3)),
            Err(FiniteError::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn bad_alpha_singletons() {
        let y = Subspace::zero(2);
        let e1 = unit(2, 0);
        let minus = vec![int(-1), int(0)];
        assert_eq!(bad_alphas(&[e1.clone()], &[minus], &y).unwrap(), vec![int(1)]);
        let two = vec![int(2), int(0)];
        assert_eq!(bad_alphas(&[e1], &[two], &y).unwrap(), vec![int(-2)]);
    }

    #[test]
    fn bad_alpha_preconditions() {
        let y = Subspace::coordinate(3, [0]);
        let err = bad_alphas(&[unit(3, 0)], &[unit(3, 1)], &y).unwrap_err();
        assert_eq!(err, FiniteError::MeetsSubspace { witness: unit(3, 0) });
        let err = bad_alphas(&[unit(3, 1), unit(3, 1)], &[unit(3, 1), unit(3, 2)], &y).unwrap_err();
        assert!(matches!(err, FiniteError::DependentVectors { .. }));
        assert!(matches!(bad_alphas(&[unit(3, 1)], &[], &y), Err(FiniteError::CountMismatch { .. })));
    }

    #[test]
    fn stability_radius_scales_with_operator() {
        let (t, _, y) = example();
        let StabilityRadius::Finite(r1) = stability_radius(&t, &y).unwrap() else { panic!() };
        let StabilityRadius::Finite(r2) = stability_radius(&t.scale(&int(2)), &y).unwrap() else { panic!() };
        assert_eq!(r2, r1.clone() * int(2));
        assert_eq!(r1, frac(1, 2));
        assert_eq!(stability_radius(&FinOperator::identity(5), &y).unwrap(), StabilityRadius::Unbounded);
    }
}

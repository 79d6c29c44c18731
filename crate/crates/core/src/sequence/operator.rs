use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::{DiagonalSpec, SparseVec};
use crate::linalg::{format_scalar, Matrix, Scalar};

/// An operator on sequences indexed by `Z` with finitely many nonzero
/// diagonals: `(T x)_{i+k} = Σ_k diag_k(i) x_i`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BandedOperator {
    diagonals: BTreeMap<i64, DiagonalSpec>,
}

impl BandedOperator {
    pub fn new(diagonals: impl IntoIterator<Item = (i64, DiagonalSpec)>) -> Self {
        let mut out = Self::zero();
        for (k, d) in diagonals {
            out.add_diagonal(k, d);
        }
        out
    }

    fn add_diagonal(&mut self, k: i64, d: DiagonalSpec) {
        let merged = match self.diagonals.remove(&k) {
            Some(existing) => add_specs(&existing, &d),
            None => d,
        };
        if !merged.is_zero() {
            self.diagonals.insert(k, merged);
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::shift(0)
    }

    /// `e_i -> e_{i+k}` for every `i`.
    pub fn shift(k: i64) -> Self {
        Self::new([(k, DiagonalSpec::constant(Scalar::one()))])
    }

    /// Finite-rank operator given by its images of finitely many basis vectors.
    pub fn from_columns(columns: impl IntoIterator<Item = (i64, SparseVec)>) -> Self {
        let mut per_offset: BTreeMap<i64, Vec<(i64, Scalar)>> = BTreeMap::new();
        for (i, image) in columns {
            for (j, x) in image.iter() {
                per_offset.entry(j - i).or_default().push((i, x.clone()));
            }
        }
        Self::new(per_offset.into_iter().map(|(k, entries)| (k, DiagonalSpec::finite(entries))))
    }

    pub fn diagonals(&self) -> &BTreeMap<i64, DiagonalSpec> {
        &self.diagonals
    }

    pub fn diagonal(&self, k: i64) -> DiagonalSpec {
        self.diagonals.get(&k).cloned().unwrap_or_else(DiagonalSpec::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.diagonals.is_empty()
    }

    pub fn lower_offset(&self) -> Option<i64> {
        self.diagonals.keys().next().copied()
    }

    pub fn upper_offset(&self) -> Option<i64> {
        self.diagonals.keys().next_back().copied()
    }

    /// How far above its source index an image coordinate can land.
    pub fn upward_reach(&self) -> i64 {
        self.upper_offset().unwrap_or(0).max(0)
    }

    /// How far below its source index an image coordinate can land.
    pub fn downward_reach(&self) -> i64 {
        (-self.lower_offset().unwrap_or(0)).max(0)
    }

    /// Matrix entry in row `row`, column `col`.
    pub fn entry(&self, row: i64, col: i64) -> Scalar {
        self.diagonals.get(&(row - col)).map_or_else(Scalar::zero, |d| d.value(col))
    }

    pub fn apply(&self, x: &SparseVec) -> SparseVec {
        let mut out = SparseVec::zero();
        for (i, xi) in x.iter() {
            for (&k, d) in &self.diagonals {
                let c = d.value(i);
                if !c.is_zero() {
                    out.add_at(i + k, &(c * xi));
                }
            }
        }
        out
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &BandedOperator) -> BandedOperator {
        // (A B)_{i+k+j, i} = Σ a_j(i + k) b_k(i)
        let mut terms: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
        for &k in rhs.diagonals.keys() {
            for &j in self.diagonals.keys() {
                terms.entry(k + j).or_default().push((k, j));
            }
        }
        let mut out = BandedOperator::zero();
        for (s, pairs) in terms {
            let mut lo = i64::MAX;
            let mut hi = i64::MIN;
            for &(k, j) in &pairs {
                let (blo, bhi) = rhs.diagonals[&k].constant_bounds();
                let (alo, ahi) = self.diagonals[&j].constant_bounds();
                lo = lo.min(blo).min(alo - k);
                hi = hi.max(bhi).max(ahi - k);
            }
            let spec = DiagonalSpec::from_fn(lo, hi, |i| {
                pairs.iter().fold(Scalar::zero(), |acc, &(k, j)| {
                    acc + self.diagonals[&j].value(i + k) * rhs.diagonals[&k].value(i)
                })
            });
            out.add_diagonal(s, spec);
        }
        out
    }

    pub fn add(&self, rhs: &BandedOperator) -> BandedOperator {
        let mut out = self.clone();
        for (&k, d) in &rhs.diagonals {
            out.add_diagonal(k, d.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> BandedOperator {
        if c.is_zero() {
            return BandedOperator::zero();
        }
        BandedOperator::new(self.diagonals.iter().map(|(&k, d)| {
            let (lo, hi) = d.constant_bounds();
            (k, DiagonalSpec::from_fn(lo, hi, |i| d.value(i) * c))
        }))
    }

    pub fn power(&self, m: u32) -> BandedOperator {
        let mut out = BandedOperator::identity();
        for _ in 0..m {
            out = self.compose(&out);
        }
        out
    }

    /// Dense matrix of the compression to indices `lo..=hi`.
    pub fn truncate(&self, lo: i64, hi: i64) -> Matrix {
        let n = (hi - lo + 1).max(0) as usize;
        let mut m = Matrix::zeros(n, n);
        for c in 0..n {
            for r in 0..n {
                m[(r, c)] = self.entry(lo + r as i64, lo + c as i64);
            }
        }
        m
    }

    /// Some index where the diagonal specs of `self` and `other` differ.
    pub fn disagreement(&self, other: &BandedOperator) -> Option<i64> {
        let offsets: std::collections::BTreeSet<i64> =
            self.diagonals.keys().chain(other.diagonals.keys()).copied().collect();
        for k in offsets {
            let a = self.diagonal(k);
            let b = other.diagonal(k);
            if a == b {
                continue;
            }
            let (alo, ahi) = a.constant_bounds();
            let (blo, bhi) = b.constant_bounds();
            let (lo, hi) = (alo.min(blo), ahi.max(bhi));
            if let Some(i) = (lo..=hi).find(|&i| a.value(i) != b.value(i)) {
                return Some(i);
            }
        }
        None
    }
}

impl fmt::Display for BandedOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .diagonals
            .iter()
            .map(|(k, d)| {
                let exc: Vec<String> =
                    d.exceptions().iter().map(|(i, x)| format!("{i}:{}", format_scalar(x))).collect();
                format!(
                    "[{k}] {}|{}..{}|{} {{{}}}",
                    format_scalar(d.left_value()),
                    d.left_end(),
                    d.right_start(),
                    format_scalar(d.right_value()),
                    exc.join(", ")
                )
            })
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl fmt::Debug for BandedOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BandedOperator({self})")
    }
}

fn add_specs(a: &DiagonalSpec, b: &DiagonalSpec) -> DiagonalSpec {
    let (alo, ahi) = a.constant_bounds();
    let (blo, bhi) = b.constant_bounds();
    DiagonalSpec::from_fn(alo.min(blo), ahi.max(bhi), |i| a.value(i) + b.value(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int;

    #[test]
    fn shift_moves_unit_vectors() {
        assert_eq!(BandedOperator::shift(1).apply(&SparseVec::unit(0)), SparseVec::unit(1));
        assert_eq!(BandedOperator::shift(1).compose(&BandedOperator::shift(1)), BandedOperator::shift(2));
        assert_eq!(BandedOperator::shift(1).compose(&BandedOperator::shift(-1)), BandedOperator::identity());
    }

    #[test]
    fn finite_rank_columns() {
        let t = BandedOperator::from_columns([(0, SparseVec::unit(1)), (-1, SparseVec::unit(2))]);
        assert_eq!(t.apply(&SparseVec::unit(-1)), SparseVec::unit(2));
        assert_eq!(t.apply(&SparseVec::unit(0)), SparseVec::unit(1));
        assert!(t.apply(&SparseVec::unit(3)).is_zero());
        assert_eq!(t.upper_offset(), Some(3));
        assert!(t.compose(&t).is_zero());
    }

    #[test]
    fn add_cancels_to_zero() {
        let s = BandedOperator::shift(2);
        assert!(s.add(&s.scale(&int(-1))).is_zero());
        assert_eq!(s.scale(&int(0)), BandedOperator::zero());
    }

    #[test]
    fn disagreement_finds_index() {
        let d = BandedOperator::new([(0, DiagonalSpec::finite([(4, int(1))]))]);
        let s = BandedOperator::shift(1);
        let ab = s.compose(&d);
        let ba = d.compose(&s);
        let i = ab.disagreement(&ba).unwrap();
        assert_ne!(ab.apply(&SparseVec::unit(i)), ba.apply(&SparseVec::unit(i)));
        assert_eq!(s.disagreement(&s), None);
    }
}

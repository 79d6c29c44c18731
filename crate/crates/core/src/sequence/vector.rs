use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::linalg::{format_scalar, Scalar};

/// A finitely supported vector on the two-sided index set. Zero entries are
/// never stored, so structural equality is equality of vectors.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseVec {
    entries: BTreeMap<i64, Scalar>,
}

impl SparseVec {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit(i: i64) -> Self {
        let mut v = Self::zero();
        v.entries.insert(i, Scalar::one());
        v
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, Scalar)>) -> Self {
        let mut v = Self::zero();
        for (i, x) in pairs {
            v.add_at(i, &x);
        }
        v
    }

    pub fn get(&self, i: i64) -> Scalar {
        self.entries.get(&i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_at(&mut self, i: i64, x: &Scalar) {
        if x.is_zero() {
            return;
        }
        let slot = self.entries.entry(i).or_insert_with(Scalar::zero);
        *slot += x;
        if slot.is_zero() {
            self.entries.remove(&i);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Scalar)> + '_ {
        self.entries.iter().map(|(&i, x)| (i, x))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn min_index(&self) -> Option<i64> {
        self.entries.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<i64> {
        self.entries.keys().next_back().copied()
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &SparseVec, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (i, x) in other.iter() {
            self.add_at(i, &(c * x));
        }
    }

    pub fn scaled(&self, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::zero();
        }
        SparseVec { entries: self.entries.iter().map(|(&i, x)| (i, x * c)).collect() }
    }

    /// Keeps only the entries with index strictly above `cutoff`.
    pub fn above(&self, cutoff: i64) -> SparseVec {
        SparseVec { entries: self.entries.range(cutoff + 1..).map(|(&i, x)| (i, x.clone())).collect() }
    }

    /// Dense coordinates on `lo..=hi`; entries outside are dropped.
    pub fn dense(&self, lo: i64, hi: i64) -> Vec<Scalar> {
        (lo..=hi).map(|i| self.get(i)).collect()
    }
}

impl fmt::Display for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (i, x)) in self.iter().enumerate() {
            let mag = x.abs();
            let sign = if x.is_negative() { "-" } else { "+" };
            match (k, x.is_negative()) {
                (0, false) => {}
                (0, true) => write!(f, "-")?,
                _ => write!(f, " {sign} ")?,
            }
            if mag.is_one() {
                write!(f, "e{i}")?;
            } else {
                write!(f, "{}*e{i}", format_scalar(&mag))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseVec({self})")
    }
}

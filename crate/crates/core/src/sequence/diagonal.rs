use std::collections::BTreeMap;

use num_traits::Zero;

use super::SequenceError;
use crate::linalg::Scalar;

/// An eventually constant two-sided sequence: `left_value` at indices
/// `<= left_end`, `right_value` at indices `>= right_start`, and finitely many
/// exceptions in between (missing entries there are zero).
///
/// Values built through the constructors are canonical, so derived equality
/// is equality of sequences.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiagonalSpec {
    left_value: Scalar,
    right_value: Scalar,
    left_end: i64,
    right_start: i64,
    exceptions: BTreeMap<i64, Scalar>,
}

impl DiagonalSpec {
    pub fn constant(c: Scalar) -> Self {
        Self {
            left_value: c.clone(),
            right_value: c,
            left_end: 0,
            right_start: 0,
            exceptions: BTreeMap::new(),
        }
    }

    pub fn zero() -> Self {
        Self::constant(Scalar::zero())
    }

    /// Finitely supported sequence.
    pub fn finite(entries: impl IntoIterator<Item = (i64, Scalar)>) -> Self {
        let entries: BTreeMap<i64, Scalar> = entries.into_iter().filter(|(_, x)| !x.is_zero()).collect();
        let (Some(&lo), Some(&hi)) = (entries.keys().next(), entries.keys().next_back()) else {
            return Self::zero();
        };
        Self::new(Scalar::zero(), Scalar::zero(), lo - 1, hi + 1, entries).expect("keys lie strictly inside")
    }

    /// Checked constructor. Requires `left_end <= right_start` and every
    /// exception index strictly between them.
    pub fn new(
        left_value: Scalar,
        right_value: Scalar,
        left_end: i64,
        right_start: i64,
        exceptions: BTreeMap<i64, Scalar>,
    ) -> Result<Self, SequenceError> {
        if left_end > right_start {
            return Err(SequenceError::InvalidDiagonal(format!(
                "left end {left_end} exceeds right start {right_start}"
            )));
        }
        if let Some((&k, _)) = exceptions.iter().find(|(&k, _)| k <= left_end || k >= right_start) {
            return Err(SequenceError::InvalidDiagonal(format!(
                "exception index {k} is not strictly between {left_end} and {right_start}"
            )));
        }
        let raw = Self { left_value, right_value, left_end, right_start, exceptions };
        let hi = raw.right_start.max(raw.left_end + 1);
        Ok(Self::from_fn(raw.left_end, hi, |i| raw.value(i)))
    }

    /// Canonical spec of a sequence `f` that is constant on `i <= lo` and on
    /// `i >= hi`. Only `f(lo..=hi)` is evaluated.
    pub fn from_fn(lo: i64, hi: i64, f: impl Fn(i64) -> Scalar) -> Self {
        assert!(lo <= hi, "from_fn needs lo <= hi");
        let values: Vec<Scalar> = (lo..=hi).map(&f).collect();
        let left = values[0].clone();
        let right = values[values.len() - 1].clone();
        let Some(a) = values.iter().position(|v| *v != left) else {
            return Self::constant(left);
        };
        let b = values.iter().rposition(|v| *v != right).expect("a deviation from left exists");
        let left_end = lo + a as i64 - 1;
        let right_start = lo + b as i64 + 1;
        let exceptions = (left_end + 1..right_start)
            .map(|i| (i, values[(i - lo) as usize].clone()))
            .filter(|(_, x)| !x.is_zero())
            .collect();
        Self { left_value: left, right_value: right, left_end, right_start, exceptions }
    }

    pub fn value(&self, i: i64) -> Scalar {
        if i <= self.left_end {
            self.left_value.clone()
        } else if i >= self.right_start {
            self.right_value.clone()
        } else {
            self.exceptions.get(&i).cloned().unwrap_or_else(Scalar::zero)
        }
    }

    pub fn left_value(&self) -> &Scalar {
        &self.left_value
    }

    pub fn right_value(&self) -> &Scalar {
        &self.right_value
    }

    pub fn left_end(&self) -> i64 {
        self.left_end
    }

    pub fn right_start(&self) -> i64 {
        self.right_start
    }

    pub fn exceptions(&self) -> &BTreeMap<i64, Scalar> {
        &self.exceptions
    }

    /// Bounds `(lo, hi)` such that the sequence is constant on `i <= lo` and
    /// on `i >= hi`, with `lo < hi`.
    pub fn constant_bounds(&self) -> (i64, i64) {
        (self.left_end, self.right_start.max(self.left_end + 1))
    }

    pub fn is_zero(&self) -> bool {
        self.left_value.is_zero() && self.right_value.is_zero() && self.exceptions.is_empty()
    }

    /// Whether only finitely many entries are nonzero.
    pub fn is_finitely_supported(&self) -> bool {
        self.left_value.is_zero() && self.right_value.is_zero()
    }
}

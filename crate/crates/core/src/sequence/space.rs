use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::{SequenceError, SparseVec};

/// The half-space `closed-span{e_i : i <= cutoff} ⊕ span(window)`.
///
/// The window is kept in reduced echelon form keyed by each vector's highest
/// index (its pivot, normalized to 1), and no window vector equals
/// `e_{cutoff+1}`; such vectors are absorbed into the tail. This makes the
/// representation unique, so derived equality is equality of subspaces.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WindowTailSpace {
    cutoff: i64,
    /// Pivot index -> window vector, ascending by pivot.
    window: BTreeMap<i64, SparseVec>,
}

impl WindowTailSpace {
    pub fn tail(cutoff: i64) -> Self {
        Self { cutoff, window: BTreeMap::new() }
    }

    /// Checked constructor; every window vector must be supported strictly
    /// above the cutoff. Dependent or zero window vectors are allowed and
    /// dropped.
    pub fn new(cutoff: i64, window: impl IntoIterator<Item = SparseVec>) -> Result<Self, SequenceError> {
        let window: Vec<SparseVec> = window.into_iter().collect();
        for v in &window {
            if let Some(i) = v.min_index().filter(|&i| i <= cutoff) {
                return Err(SequenceError::WindowBelowCutoff { index: i, cutoff });
            }
        }
        Ok(Self::canonical(cutoff, window))
    }

    /// Drops every coordinate at or below the cutoff first, which leaves the
    /// spanned subspace unchanged once the tail is added.
    pub fn from_vectors(cutoff: i64, vectors: impl IntoIterator<Item = SparseVec>) -> Self {
        Self::canonical(cutoff, vectors.into_iter().map(|v| v.above(cutoff)).collect())
    }

    fn canonical(mut cutoff: i64, vectors: Vec<SparseVec>) -> Self {
        let mut window: BTreeMap<i64, SparseVec> = BTreeMap::new();
        for v in vectors {
            insert_reduced(&mut window, v);
        }
        // A fully reduced vector with pivot cutoff+1 can only be e_{cutoff+1},
        // and every other vector is zero at that pivot.
        while window.remove(&(cutoff + 1)).is_some() {
            cutoff += 1;
        }
        Self { cutoff, window }
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn window(&self) -> impl Iterator<Item = &SparseVec> + '_ {
        self.window.values()
    }

    pub fn window_vectors(&self) -> Vec<SparseVec> {
        self.window.values().cloned().collect()
    }

    pub fn window_dim(&self) -> usize {
        self.window.len()
    }

    /// Highest index any window vector touches.
    pub fn top(&self) -> i64 {
        self.window.keys().next_back().copied().unwrap_or(self.cutoff)
    }

    /// The part of `x` above the cutoff, reduced modulo the window. Zero iff
    /// `x` lies in the space.
    pub fn residue(&self, x: &SparseVec) -> SparseVec {
        let mut r = x.above(self.cutoff);
        for (&p, w) in self.window.iter().rev() {
            let c = r.get(p);
            if !c.is_zero() {
                r.add_scaled(w, &-c);
            }
        }
        r
    }

    pub fn contains(&self, x: &SparseVec) -> bool {
        self.residue(x).is_zero()
    }

    pub fn is_subspace_of(&self, other: &WindowTailSpace) -> bool {
        self.cutoff <= other.cutoff && self.window.values().all(|w| other.contains(w))
    }

    /// `dim(sup / self)`, after checking containment. The error carries a
    /// vector of `self` outside `sup`.
    pub fn codim_in(&self, sup: &WindowTailSpace) -> Result<usize, SequenceError> {
        if self.cutoff > sup.cutoff {
            return Err(SequenceError::NotContained { witness: SparseVec::unit(sup.cutoff + 1) });
        }
        if let Some(w) = self.window.values().find(|w| !sup.contains(w)) {
            return Err(SequenceError::NotContained { witness: w.clone() });
        }
        let total = (sup.cutoff - self.cutoff) as usize + sup.window_dim();
        Ok(total - self.window_dim())
    }

    /// Checks the canonical-form invariants.
    pub fn is_canonical(&self) -> bool {
        if self.window.contains_key(&(self.cutoff + 1)) {
            return false;
        }
        self.window.iter().all(|(&p, w)| {
            w.max_index() == Some(p)
                && w.get(p).is_one()
                && w.min_index().is_some_and(|i| i > self.cutoff)
                && self.window.keys().all(|&q| q == p || w.get(q).is_zero())
        })
    }
}

/// Reduced echelon basis of `span(vectors)`, keyed by highest index and
/// ordered by it.
pub fn echelon_basis(vectors: impl IntoIterator<Item = SparseVec>) -> Vec<SparseVec> {
    let mut rows = BTreeMap::new();
    for v in vectors {
        insert_reduced(&mut rows, v);
    }
    rows.into_values().collect()
}

fn insert_reduced(window: &mut BTreeMap<i64, SparseVec>, mut v: SparseVec) {
    for (&p, w) in window.iter() {
        let c = v.get(p);
        if !c.is_zero() {
            v.add_scaled(w, &-c);
        }
    }
    let Some(p) = v.max_index() else {
        return;
    };
    let lead = v.get(p);
    let v = v.scaled(&(num_traits::one::<crate::linalg::Scalar>() / lead));
    for w in window.values_mut() {
        let c = w.get(p);
        if !c.is_zero() {
            w.add_scaled(&v, &-c);
        }
    }
    window.insert(p, v);
}

impl fmt::Display for WindowTailSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.window.values().map(ToString::to_string).collect();
        write!(f, "cutoff={} window=[{}]", self.cutoff, parts.join(", "))
    }
}

impl fmt::Debug for WindowTailSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WindowTailSpace({self})")
    }
}

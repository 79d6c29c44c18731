//! Finitely generated operator algebras: commutation checks, invariant
//! half-spaces from a common error space, staged extraction for commuting
//! generators, and sampled bounds on `d` over the generated algebra.

use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::finite::{self, FinOperator, FiniteError};
use crate::linalg::{format_scalar, format_vector, frac, unit, Scalar, Subspace};
use crate::sequence::{
    extract_invariant, seq_error_dimension, seq_going_up, seq_is_invariant, seq_minimal_error_collection, BandedOperator,
    Outcome, ReductionTrace, SequenceError, SparseVec, WindowTailSpace,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("an algebra needs at least one generator")]
    Empty,
    #[error("generator {index} does not act on the same space as generator 0")]
    Incompatible { index: usize },
    #[error("generators {first} and {second} do not commute; witness {witness}")]
    NotCommuting { first: String, second: String, witness: String },
    #[error("no common finite F certified after {rounds} closure rounds")]
    NoCommonF { rounds: usize },
    #[error("stage {stage} move {step} broke invariance under {generator}")]
    PreservationViolated { stage: usize, step: usize, generator: String },
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Finite(#[from] FiniteError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// The operations both models share.
pub trait ModelOperator: Clone + fmt::Debug {
    type Space: Clone + PartialEq + fmt::Debug + fmt::Display;

    /// Whether `self` and `other` act on the same space.
    fn compatible(&self, other: &Self) -> bool;
    fn identity_like(&self) -> Self;
    fn compose(&self, rhs: &Self) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn scale(&self, c: &Scalar) -> Self;
    fn error_dimension(&self, y: &Self::Space) -> Result<usize, AlgebraError>;
    fn going_up(&self, y: &Self::Space) -> Result<Self::Space, AlgebraError>;
    /// A vector on which `self ∘ other` and `other ∘ self` differ.
    fn commutator_witness(&self, other: &Self) -> Option<String>;
    /// `Y ⊕ G` for the minimal common error space `G` of `ops`, and `dim G`.
    fn common_error_extension(ops: &[Self], y: &Self::Space) -> Result<(Self::Space, usize), AlgebraError>;
    fn codim(sub: &Self::Space, sup: &Self::Space) -> Result<usize, AlgebraError>;
    /// Rounds of closure under going-up to try before giving up.
    fn closure_limit(y: &Self::Space) -> usize;
}

impl ModelOperator for FinOperator {
    type Space = Subspace;

    fn compatible(&self, other: &Self) -> bool {
        self.dim() == other.dim()
    }

    fn identity_like(&self) -> Self {
        FinOperator::identity(self.dim())
    }

    fn compose(&self, rhs: &Self) -> Self {
        FinOperator::compose(self, rhs).expect("compatible generators")
    }

    fn add(&self, rhs: &Self) -> Self {
        FinOperator::add(self, rhs).expect("compatible generators")
    }

    fn scale(&self, c: &Scalar) -> Self {
        FinOperator::scale(self, c)
    }

    fn error_dimension(&self, y: &Subspace) -> Result<usize, AlgebraError> {
        Ok(finite::error_dimension(self, y)?)
    }

    fn going_up(&self, y: &Subspace) -> Result<Subspace, AlgebraError> {
        Ok(finite::going_up(self, y)?)
    }

    fn commutator_witness(&self, other: &Self) -> Option<String> {
        let ab = ModelOperator::compose(self, other);
        let ba = ModelOperator::compose(other, self);
        let n = self.dim();
        (0..n)
            .find(|&j| ab.matrix().column(j) != ba.matrix().column(j))
            .map(|j| format_vector(&unit(n, j)))
    }

    fn common_error_extension(ops: &[Self], y: &Subspace) -> Result<(Subspace, usize), AlgebraError> {
        let w = finite::minimal_error_collection(ops, y)?;
        let z = y.sum(&w.error_space).map_err(FiniteError::from)?;
        Ok((z, w.d))
    }

    fn codim(sub: &Subspace, sup: &Subspace) -> Result<usize, AlgebraError> {
        Ok(sub.codim_in(sup).map_err(FiniteError::from)?)
    }

    fn closure_limit(y: &Subspace) -> usize {
        // each productive round raises the dimension
        y.ambient_dim() + 1
    }
}

/// Closure rounds tried in the sequence model before reporting failure.
pub const SEQUENCE_CLOSURE_ROUNDS: usize = 64;

impl ModelOperator for BandedOperator {
    type Space = WindowTailSpace;

    fn compatible(&self, _other: &Self) -> bool {
        true
    }

    fn identity_like(&self) -> Self {
        BandedOperator::identity()
    }

    fn compose(&self, rhs: &Self) -> Self {
        BandedOperator::compose(self, rhs)
    }

    fn add(&self, rhs: &Self) -> Self {
        BandedOperator::add(self, rhs)
    }

    fn scale(&self, c: &Scalar) -> Self {
        BandedOperator::scale(self, c)
    }

    fn error_dimension(&self, y: &WindowTailSpace) -> Result<usize, AlgebraError> {
        Ok(seq_error_dimension(self, y))
    }

    fn going_up(&self, y: &WindowTailSpace) -> Result<WindowTailSpace, AlgebraError> {
        Ok(seq_going_up(self, y))
    }

    fn commutator_witness(&self, other: &Self) -> Option<String> {
        let ab = BandedOperator::compose(self, other);
        let ba = BandedOperator::compose(other, self);
        ab.disagreement(&ba).map(|i| SparseVec::unit(i).to_string())
    }

    fn common_error_extension(ops: &[Self], y: &WindowTailSpace) -> Result<(WindowTailSpace, usize), AlgebraError> {
        let (g, basis) = seq_minimal_error_collection(ops, y);
        let mut vectors = y.window_vectors();
        vectors.extend(basis);
        let z = WindowTailSpace::from_vectors(y.cutoff(), vectors);
        debug_assert_eq!(y.codim_in(&z).ok(), Some(g));
        Ok((z, g))
    }

    fn codim(sub: &WindowTailSpace, sup: &WindowTailSpace) -> Result<usize, AlgebraError> {
        Ok(sub.codim_in(sup)?)
    }

    fn closure_limit(_y: &WindowTailSpace) -> usize {
        SEQUENCE_CLOSURE_ROUNDS
    }
}

/// Generators of an operator algebra, all acting on one space.
#[derive(Debug, Clone)]
pub struct AlgebraPresentation<T> {
    pub label: String,
    generators: Vec<T>,
    names: Vec<String>,
}

impl<T: ModelOperator> AlgebraPresentation<T> {
    /// Generators are named `T1, T2, ...`.
    pub fn new(label: impl Into<String>, generators: Vec<T>) -> Result<Self, AlgebraError> {
        let names = (1..=generators.len()).map(|i| format!("T{i}")).collect();
        Self::with_names(label, generators, names)
    }

    pub fn with_names(label: impl Into<String>, generators: Vec<T>, names: Vec<String>) -> Result<Self, AlgebraError> {
        let Some(first) = generators.first() else {
            return Err(AlgebraError::Empty);
        };
        if let Some(index) = generators.iter().position(|g| !first.compatible(g)) {
            return Err(AlgebraError::Incompatible { index });
        }
        if names.len() != generators.len() {
            return Err(AlgebraError::InvalidArgument(format!(
                "{} names for {} generators",
                names.len(),
                generators.len()
            )));
        }
        Ok(Self { label: label.into(), generators, names })
    }

    pub fn generators(&self) -> &[T] {
        &self.generators
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Commutation {
    Commuting,
    NotCommuting { first: usize, second: usize, witness: String },
}

impl Commutation {
    pub fn is_commuting(&self) -> bool {
        matches!(self, Commutation::Commuting)
    }
}

/// Compares `A∘B` with `B∘A` exactly for every pair of generators.
pub fn check_commuting<T: ModelOperator>(a: &AlgebraPresentation<T>) -> Commutation {
    let g = a.generators();
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            if let Some(witness) = g[i].commutator_witness(&g[j]) {
                return Commutation::NotCommuting { first: i, second: j, witness };
            }
        }
    }
    Commutation::Commuting
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonInvariant<S> {
    pub space: S,
    /// `dim G` of the minimal common error space.
    pub common_dim: usize,
    /// `dim(Z / Y)`; equals `common_dim` when `Y ⊕ G` is already invariant.
    pub extension_dim: usize,
    /// Going-up rounds needed after `Y ⊕ G`.
    pub closure_rounds: usize,
}

/// An invariant space containing `Y ⊕ G`, where `G` is the minimal common
/// error space of the generators.
///
/// If `Y ⊕ G` is not yet invariant, it is enlarged by going up under each
/// generator until it is. Invariance under every generator is checked
/// before returning.
pub fn invariant_from_common_f<T: ModelOperator>(
    a: &AlgebraPresentation<T>,
    y: &T::Space,
) -> Result<CommonInvariant<T::Space>, AlgebraError> {
    let (mut z, common_dim) = T::common_error_extension(a.generators(), y)?;
    let limit = T::closure_limit(y);
    for rounds in 0..=limit {
        let mut changed = false;
        for t in a.generators() {
            if t.error_dimension(&z)? > 0 {
                z = t.going_up(&z)?;
                changed = true;
            }
        }
        if !changed {
            for t in a.generators() {
                if t.error_dimension(&z)? != 0 {
                    return Err(AlgebraError::NoCommonF { rounds });
                }
            }
            let extension_dim = T::codim(y, &z)?;
            return Ok(CommonInvariant { space: z, common_dim, extension_dim, closure_rounds: rounds });
        }
    }
    Err(AlgebraError::NoCommonF { rounds: limit })
}

/// One generator's extraction inside a commuting extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub generator: usize,
    pub name: String,
    pub trace: ReductionTrace,
    /// Number of `(space, earlier generator)` invariance checks made.
    pub audited: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommutingOutcome {
    Invariant(WindowTailSpace),
    NoReductionFound { stage: usize, depth: usize, profile: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutingTrace {
    pub stages: Vec<Stage>,
    pub outcome: CommutingOutcome,
}

impl fmt::Display for CommutingTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.stages.iter().enumerate() {
            writeln!(f, "STAGE {} op={}", k + 1, s.name)?;
            writeln!(f, "{}", s.trace)?;
            writeln!(f, "AUDIT checks={} preserved", s.audited)?;
        }
        match &self.outcome {
            CommutingOutcome::Invariant(z) => write!(f, "RESULT INVARIANT {z}"),
            CommutingOutcome::NoReductionFound { stage, .. } => write!(f, "RESULT NO-REDUCTION stage={stage}"),
        }
    }
}

/// Runs single-generator extraction for each generator in order, starting
/// each stage from the previous stage's invariant space.
///
/// Every space visited at stage `k` is checked to stay invariant under the
/// generators of stages `1..k`; a failure is reported as an error.
pub fn extract_invariant_commuting(
    a: &AlgebraPresentation<BandedOperator>,
    y: &WindowTailSpace,
    max_depth: usize,
) -> Result<CommutingTrace, AlgebraError> {
    if let Commutation::NotCommuting { first, second, witness } = check_commuting(a) {
        return Err(AlgebraError::NotCommuting {
            first: a.names()[first].clone(),
            second: a.names()[second].clone(),
            witness,
        });
    }
    let gens = a.generators();
    let mut stages = Vec::with_capacity(gens.len());
    let mut current = y.clone();
    for (k, t) in gens.iter().enumerate() {
        let trace = extract_invariant(t, &current, max_depth);
        let mut audited = 0;
        let visited = std::iter::once(&trace.initial).chain(trace.moves.iter().map(|m| &m.space_after));
        for (step, w) in visited.enumerate() {
            for (j, s) in gens[..k].iter().enumerate() {
                audited += 1;
                if !seq_is_invariant(s, w) {
                    return Err(AlgebraError::PreservationViolated {
                        stage: k + 1,
                        step,
                        generator: a.names()[j].clone(),
                    });
                }
            }
        }
        let outcome = trace.outcome.clone();
        stages.push(Stage { generator: k, name: a.names()[k].clone(), trace, audited });
        match outcome {
            Outcome::Invariant(z) => current = z,
            Outcome::NoReductionFound { depth, profile } => {
                return Ok(CommutingTrace {
                    stages,
                    outcome: CommutingOutcome::NoReductionFound { stage: k + 1, depth, profile },
                });
            }
        }
    }
    debug_assert!(gens.iter().all(|t| seq_is_invariant(t, &current)));
    Ok(CommutingTrace { stages, outcome: CommutingOutcome::Invariant(current) })
}

/// A noncommutative polynomial without constant term: a sum of
/// `coefficient * letter_1 * ... * letter_k`, letters indexing generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    pub terms: Vec<(Scalar, Vec<usize>)>,
}

impl Word {
    /// Merges terms with equal letter sequences, keeping first-appearance
    /// order, and drops zero coefficients.
    pub fn collect(terms: Vec<(Scalar, Vec<usize>)>) -> Word {
        let mut merged: Vec<(Scalar, Vec<usize>)> = Vec::new();
        for (c, letters) in terms {
            match merged.iter_mut().find(|(_, l)| *l == letters) {
                Some((acc, _)) => *acc += c,
                None => merged.push((c, letters)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        Word { terms: merged }
    }

    pub fn evaluate<T: ModelOperator>(&self, generators: &[T]) -> T {
        let first = &generators[0];
        let mut total: Option<T> = None;
        for (c, letters) in &self.terms {
            let product = letters
                .iter()
                .fold(first.identity_like(), |acc, &l| acc.compose(&generators[l]));
            let term = product.scale(c);
            total = Some(match total {
                Some(t) => t.add(&term),
                None => term,
            });
        }
        total.unwrap_or_else(|| first.identity_like().scale(&Scalar::zero()))
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (c, letters)) in self.terms.iter().enumerate() {
            let product: Vec<&str> = letters.iter().map(|&l| names[l].as_str()).collect();
            let magnitude = c.abs();
            let body = if magnitude.is_one() {
                product.join("*")
            } else {
                format!("{}*{}", format_scalar(&magnitude), product.join("*"))
            };
            match (k, c.is_negative()) {
                (0, false) => out.push_str(&body),
                (0, true) => out.push_str(&format!("-{body}")),
                (_, false) => out.push_str(&format!(" + {body}")),
                (_, true) => out.push_str(&format!(" - {body}")),
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeRow {
    pub degree: usize,
    /// Words sampled at degrees `1..=degree`.
    pub words: usize,
    pub max_d: usize,
    pub argmax_word: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSampleReport {
    pub degree_bound: usize,
    /// Words drawn per degree block.
    pub samples: usize,
    pub words_evaluated: usize,
    pub max_d: usize,
    pub argmax_word: String,
    /// The word attaining `max_d`.
    pub argmax: Word,
    pub rows: Vec<DegreeRow>,
    /// `dim(Z / Y)` for the invariant `Z` from the common error space, if
    /// one was found. Bounds `d` for every element of the algebra.
    pub certified_bound: Option<usize>,
}

impl fmt::Display for WordSampleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "degree words max_d argmax")?;
        for r in &self.rows {
            writeln!(f, "{} {} {} {}", r.degree, r.words, r.max_d, r.argmax_word)?;
        }
        writeln!(f, "max_d = {}", self.max_d)?;
        writeln!(f, "argmax = {}", self.argmax_word)?;
        match self.certified_bound {
            Some(b) => write!(f, "certified_bound = {b}"),
            None => write!(f, "certified_bound = none"),
        }
    }
}

/// The `s`-th word of the degree-`k` block. Its first term has length
/// exactly `k`, later terms at most `k`.
pub fn sample_word(seed: u64, k: usize, s: usize, letters: usize) -> Word {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((k as u64) << 32) | s as u64);
    let n_terms = rng.gen_range(1..=3);
    let terms = (0..n_terms)
        .map(|t| {
            let len = if t == 0 { k } else { rng.gen_range(1..=k) };
            let mut num = 0;
            while num == 0 {
                num = rng.gen_range(-5..=5);
            }
            let den = rng.gen_range(1..=5);
            let word = (0..len).map(|_| rng.gen_range(0..letters)).collect();
            (frac(num, den), word)
        })
        .collect();
    Word::collect(terms)
}

/// Samples `samples` words per degree `1..=degree` and reports the largest
/// `d(Y, S)` seen. The words for a smaller degree bound are a subset of
/// those for a larger one, so `max_d` only grows with the degree.
pub fn word_sample_bound<T: ModelOperator>(
    a: &AlgebraPresentation<T>,
    y: &T::Space,
    degree: usize,
    samples: usize,
    seed: u64,
) -> Result<WordSampleReport, AlgebraError> {
    if degree == 0 || samples == 0 {
        return Err(AlgebraError::InvalidArgument("degree and samples must be at least 1".into()));
    }
    let mut rows = Vec::with_capacity(degree);
    let mut best: Option<(usize, String, Word)> = None;
    for k in 1..=degree {
        for s in 0..samples {
            let word = sample_word(seed, k, s, a.len());
            let d = word.evaluate(a.generators()).error_dimension(y)?;
            let rendered = word.render(a.names());
            let better = match &best {
                None => true,
                Some((bd, bw, _)) => d > *bd || (d == *bd && rendered < *bw),
            };
            if better {
                best = Some((d, rendered, word));
            }
        }
        let (max_d, argmax_word, _) = best.clone().expect("samples >= 1");
        rows.push(DegreeRow { degree: k, words: k * samples, max_d, argmax_word });
    }
    let certified_bound = match invariant_from_common_f(a, y) {
        Ok(c) => Some(c.extension_dim),
        Err(AlgebraError::NoCommonF { .. }) => None,
        Err(e) => return Err(e),
    };
    let (max_d, argmax_word, argmax) = best.expect("samples >= 1");
    Ok(WordSampleReport {
        degree_bound: degree,
        samples,
        words_evaluated: degree * samples,
        max_d,
        argmax_word,
        argmax,
        rows,
        certified_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int;

    fn example() -> AlgebraPresentation<BandedOperator> {
        let t = BandedOperator::from_columns([(0, SparseVec::unit(1)), (-1, SparseVec::unit(2))]);
        let s = BandedOperator::from_columns([(0, SparseVec::unit(3))]);
        AlgebraPresentation::with_names("example", vec![t, s], vec!["T".into(), "S".into()]).unwrap()
    }

    #[test]
    fn example_commutes() {
        assert!(check_commuting(&example()).is_commuting());
        let b = BandedOperator::shift(-1);
        let a = AlgebraPresentation::new("b", vec![b.clone(), b.power(3)]).unwrap();
        assert!(check_commuting(&a).is_commuting());
    }

    #[test]
    fn shift_and_diagonal_do_not_commute() {
        let diag = BandedOperator::new([(0, crate::sequence::DiagonalSpec::finite([(2, int(3))]))]);
        let a = AlgebraPresentation::new("x", vec![BandedOperator::shift(1), diag]).unwrap();
        let Commutation::NotCommuting { first: 0, second: 1, witness } = check_commuting(&a) else {
            panic!("expected a counterexample");
        };
        assert!(witness.starts_with('e'));
    }

    #[test]
    fn common_f_on_example() {
        let c = invariant_from_common_f(&example(), &WindowTailSpace::tail(0)).unwrap();
        assert_eq!(c.space, WindowTailSpace::tail(3));
        assert_eq!(c.common_dim, 3);
        assert_eq!(c.extension_dim, 3);
        assert_eq!(c.closure_rounds, 0);
    }

    #[test]
    fn common_f_fails_for_forward_shift() {
        let a = AlgebraPresentation::new("s", vec![BandedOperator::shift(1)]).unwrap();
        assert!(matches!(
            invariant_from_common_f(&a, &WindowTailSpace::tail(0)),
            Err(AlgebraError::NoCommonF { .. })
        ));
    }

    #[test]
    fn identity_keeps_space() {
        let a = AlgebraPresentation::new("id", vec![FinOperator::identity(4)]).unwrap();
        let y = Subspace::coordinate(4, [1, 2]);
        assert_eq!(invariant_from_common_f(&a, &y).unwrap().space, y);
    }

    #[test]
    fn commuting_extraction_on_example() {
        let trace = extract_invariant_commuting(&example(), &WindowTailSpace::tail(0), 16).unwrap();
        assert_eq!(trace.outcome, CommutingOutcome::Invariant(WindowTailSpace::tail(-2)));
        assert!(trace.stages[1].trace.moves.is_empty());
    }

    #[test]
    fn word_rendering() {
        let w = Word { terms: vec![(frac(-2, 3), vec![0, 1]), (int(1), vec![1]), (frac(-1, 1), vec![0])] };
        assert_eq!(w.render(&["T".into(), "S".into()]), "-2/3*T*S + S - T");
    }

    #[test]
    fn sampled_words_are_deterministic() {
        assert_eq!(sample_word(7, 3, 5, 2), sample_word(7, 3, 5, 2));
        let w = Word::collect(vec![(int(2), vec![0]), (int(1), vec![1]), (int(-2), vec![0])]);
        assert_eq!(w.render(&["T".into(), "S".into()]), "S");
        assert_eq!(Word::collect(vec![(int(1), vec![0]), (int(-1), vec![0])]).render(&[]), "0");
    }

    #[test]
    fn shift_sample_bound() {
        let a = AlgebraPresentation::new("s", vec![BandedOperator::shift(1)]).unwrap();
        let r = word_sample_bound(&a, &WindowTailSpace::tail(0), 4, 5, 1).unwrap();
        assert_eq!(r.rows.iter().map(|r| r.max_d).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        assert_eq!(r.certified_bound, None);
    }
}

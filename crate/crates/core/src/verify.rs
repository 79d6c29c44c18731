//! Seeded random instances and the lemma checks run by `verify-lemmas`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{extract_invariant_commuting, AlgebraError, AlgebraPresentation, CommutingOutcome};
use crate::finite::{self, FinOperator, StabilityRadius};
use crate::linalg::{self, frac, int, Matrix, Scalar, Subspace};
use crate::sequence::{
    extract_invariant, power_error_profile, seq_error_dimension, seq_going_down, seq_going_up, seq_is_invariant,
    BandedOperator, DiagonalSpec, Outcome, SparseVec, WindowTailSpace,
};

pub type InstanceRng = ChaCha8Rng;

/// Independent generator for stream `stream` of `seed`.
pub fn rng_for(seed: u64, stream: u64) -> InstanceRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Small rational, zero about a third of the time.
pub fn random_scalar(rng: &mut impl Rng) -> Scalar {
    if rng.gen_bool(0.35) {
        return int(0);
    }
    frac(rng.gen_range(-3..=3), rng.gen_range(1..=3))
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> Vec<Scalar> {
    (0..n).map(|_| random_scalar(rng)).collect()
}

/// Square matrix; sometimes of deliberately low rank.
pub fn random_fin_operator(rng: &mut impl Rng, n: usize) -> FinOperator {
    let m = if n > 1 && rng.gen_bool(0.3) {
        let r = rng.gen_range(1..n);
        let left = Matrix::from_columns(n, &(0..r).map(|_| random_vector(rng, n)).collect::<Vec<_>>()).unwrap();
        let right = Matrix::from_rows((0..r).map(|_| random_vector(rng, n)).collect()).unwrap();
        left.mul(&right).unwrap()
    } else {
        Matrix::from_rows((0..n).map(|_| random_vector(rng, n)).collect()).unwrap()
    };
    FinOperator::new(m).unwrap()
}

/// Span of up to `n` random vectors, occasionally a coordinate subspace.
pub fn random_subspace(rng: &mut impl Rng, n: usize) -> Subspace {
    if rng.gen_bool(0.2) {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(rng);
        let k = rng.gen_range(0..=n);
        return Subspace::coordinate(n, idx[..k].iter().copied());
    }
    let k = rng.gen_range(0..=n);
    Subspace::span(n, &(0..k).map(|_| random_vector(rng, n)).collect::<Vec<_>>()).unwrap()
}

pub fn random_diagonal(rng: &mut impl Rng) -> DiagonalSpec {
    let values = [int(0), int(0), int(1), int(-1), int(2), frac(1, 2)];
    let left = values.choose(rng).unwrap().clone();
    let right = if rng.gen_bool(0.6) { left.clone() } else { values.choose(rng).unwrap().clone() };
    let lo = rng.gen_range(-4..=2);
    let hi = lo + rng.gen_range(1..=5);
    let mut exceptions = std::collections::BTreeMap::new();
    for i in lo + 1..hi {
        if rng.gen_bool(0.4) {
            exceptions.insert(i, random_scalar(rng));
        }
    }
    DiagonalSpec::new(left, right, lo, hi, exceptions).unwrap()
}

/// One to three diagonals at offsets in `-2..=2`.
pub fn random_banded(rng: &mut impl Rng) -> BandedOperator {
    let mut offsets: Vec<i64> = (-2..=2).collect();
    offsets.shuffle(rng);
    let k = rng.gen_range(1..=3);
    BandedOperator::new(offsets[..k].iter().map(|&o| (o, random_diagonal(rng))))
}

/// Finite-rank operator with images of a few coordinates near zero.
pub fn random_finite_rank_banded(rng: &mut impl Rng) -> BandedOperator {
    let cols = (0..rng.gen_range(1..=3)).map(|_| {
        let i = rng.gen_range(-3..=2);
        let image = SparseVec::from_pairs((0..rng.gen_range(1..=2)).map(|_| (rng.gen_range(-3..=4), random_scalar(rng))));
        (i, image)
    });
    BandedOperator::from_columns(cols.collect::<Vec<_>>())
}

pub fn random_window_space(rng: &mut impl Rng) -> WindowTailSpace {
    let c = rng.gen_range(-3..=3);
    let k = rng.gen_range(0..=2);
    let mut window = Vec::with_capacity(k);
    for _ in 0..k {
        let mut v = SparseVec::zero();
        for i in c + 1..=c + 6 {
            if rng.gen_bool(0.4) {
                v.add_at(i, &random_scalar(rng));
            }
        }
        window.push(v);
    }
    WindowTailSpace::new(c, window).unwrap()
}

/// A random sequence-model pair, mixing banded and finite-rank operators.
pub fn random_sequence_instance(rng: &mut impl Rng) -> (BandedOperator, WindowTailSpace) {
    let t = if rng.gen_bool(0.3) { random_finite_rank_banded(rng) } else { random_banded(rng) };
    (t, random_window_space(rng))
}

/// `(us, vs, Y)` with the `us` independent modulo `Y`; some `v_i` are
/// built so that a chosen `α` is bad.
pub fn random_small_indep(rng: &mut impl Rng) -> (Vec<Vec<Scalar>>, Vec<Vec<Scalar>>, Subspace) {
    loop {
        let n = rng.gen_range(3..=6);
        let big_n = rng.gen_range(1..=3.min(n - 1));
        let y = Subspace::span(n, &(0..rng.gen_range(0..=n - big_n)).map(|_| random_vector(rng, n)).collect::<Vec<_>>())
            .unwrap();
        let us: Vec<Vec<Scalar>> = (0..big_n).map(|_| random_vector(rng, n)).collect();
        if !finite::independent_mod(&us, &y).unwrap() {
            continue;
        }
        let vs = us
            .iter()
            .map(|u| {
                if rng.gen_bool(0.4) {
                    let a = frac(rng.gen_range(-4..=4), rng.gen_range(1..=2));
                    let tail = y.combine(&random_vector(rng, y.dim()));
                    u.iter().zip(&tail).map(|(ui, ti)| ti - &a * ui).collect()
                } else {
                    random_vector(rng, n)
                }
            })
            .collect();
        return (us, vs, y);
    }
}

/// A rational strictly inside `(-δ, δ)`.
pub fn random_below(rng: &mut impl Rng, delta: &Scalar) -> Scalar {
    let den = rng.gen_range(2..=1000);
    let num = rng.gen_range(-(den - 1)..=den - 1);
    delta * frac(num, den)
}

/// The index window on which the dense compression of `T` sees every
/// contributing generator of `Y` and all of its image.
pub fn truncation_window(t: &BandedOperator, y: &WindowTailSpace) -> (i64, i64) {
    let u = t.upward_reach();
    let lo = y.cutoff() - u - t.downward_reach() - 1;
    let hi = y.top().max(y.cutoff()) + u + 1;
    (lo, hi)
}

/// `Y` restricted to `lo..=hi` as a subspace of `Q^(hi-lo+1)`.
pub fn truncate_space(y: &WindowTailSpace, lo: i64, hi: i64) -> Subspace {
    let n = (hi - lo + 1) as usize;
    let mut vectors: Vec<Vec<Scalar>> = (lo..=y.cutoff()).map(|i| linalg::unit(n, (i - lo) as usize)).collect();
    vectors.extend(y.window().map(|w| w.dense(lo, hi)));
    Subspace::span(n, &vectors).unwrap()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaResult {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub seed: u64,
    pub rows: Vec<LemmaResult>,
}

impl LemmaReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed == r.total)
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed = {}", self.seed)?;
        for r in &self.rows {
            let status = if r.passed == r.total { "ok" } else { "FAIL" };
            writeln!(f, "{:<28} {:>5}/{:<5} {status}", r.name, r.passed, r.total)?;
        }
        write!(f, "{}", if self.all_passed() { "all lemmas hold" } else { "some lemmas FAILED" })
    }
}

fn tally(name: &'static str, seed: u64, stream: u64, total: usize, mut check: impl FnMut(&mut InstanceRng) -> bool) -> LemmaResult {
    let mut rng = rng_for(seed, stream);
    let passed = (0..total).filter(|_| check(&mut rng)).count();
    LemmaResult { name, passed, total }
}

fn fin_instance(rng: &mut InstanceRng, max_n: usize) -> (FinOperator, Subspace) {
    let n = rng.gen_range(1..=max_n);
    (random_fin_operator(rng, n), random_subspace(rng, n))
}

/// `d` as `rank[Y | TY] - dim Y`, without the quotient map.
fn d_by_sum(t: &FinOperator, y: &Subspace) -> usize {
    let mut cols: Vec<Vec<Scalar>> = y.basis().to_vec();
    cols.extend(t.image_of_basis(y).unwrap());
    linalg::rank(&Matrix::from_columns(y.ambient_dim(), &cols).unwrap()) - y.dim()
}

fn check_quotient(rng: &mut InstanceRng) -> bool {
    let (t, y) = fin_instance(rng, 10);
    finite::error_dimension(&t, &y).unwrap() == d_by_sum(&t, &y)
}

fn check_minimal_error_space(rng: &mut InstanceRng) -> bool {
    let (t, y) = fin_instance(rng, 10);
    let w = finite::minimal_error_subspace(&t, &y).unwrap();
    let f = &w.error_space;
    let ty = Subspace::span(y.ambient_dim(), &t.image_of_basis(&y).unwrap()).unwrap();
    let sum = y.sum(f).unwrap();
    f.dim() == w.d
        && w.d == finite::error_dimension(&t, &y).unwrap()
        && y.intersect(f).unwrap().dim() == 0
        && f.is_subspace_of(&ty).unwrap()
        && ty.is_subspace_of(&sum).unwrap()
}

fn check_witness_bound(rng: &mut InstanceRng) -> bool {
    let (t, y) = fin_instance(rng, 6);
    let images = t.image_of_basis(&y).unwrap();
    let mut best = 0;
    for mask in 0u32..(1 << images.len()) {
        let subset: Vec<Vec<Scalar>> =
            images.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v.clone()).collect();
        if finite::independent_mod(&subset, &y).unwrap() {
            best = best.max(subset.len());
        }
    }
    best == finite::error_dimension(&t, &y).unwrap()
}

fn check_down_up_finite(rng: &mut InstanceRng) -> bool {
    let (t, y) = fin_instance(rng, 10);
    let d = finite::error_dimension(&t, &y).unwrap();
    let down = finite::going_down(&t, &y).unwrap();
    let up = finite::going_up(&t, &y).unwrap();
    down.codim_in(&y).ok() == Some(d) && y.codim_in(&up).ok() == Some(d)
}

fn check_down_up_sequence(rng: &mut InstanceRng) -> bool {
    let (t, y) = random_sequence_instance(rng);
    let d = seq_error_dimension(&t, &y);
    let down = seq_going_down(&t, &y);
    let up = seq_going_up(&t, &y);
    down.is_canonical() && up.is_canonical() && down.codim_in(&y).ok() == Some(d) && y.codim_in(&up).ok() == Some(d)
}

fn check_rank_nullity(rng: &mut InstanceRng) -> bool {
    let (t, y) = fin_instance(rng, 10);
    let q = finite::quotient_composed(&t, &y).unwrap();
    let r = linalg::reduce(&q);
    r.rank + r.kernel.dim() == q.cols() && r.row_space.dim() == r.rank
}

fn check_bad_alpha(rng: &mut InstanceRng) -> bool {
    let (us, vs, y) = random_small_indep(rng);
    let bad = finite::bad_alphas(&us, &vs, &y).unwrap();
    if bad.len() > us.len() {
        return false;
    }
    let indep = |a: &Scalar| finite::independent_mod(&finite::shifted(&us, &vs, a), &y).unwrap();
    if bad.iter().any(indep) {
        return false;
    }
    (0..50).all(|_| {
        let a = frac(rng.gen_range(-12..=12), rng.gen_range(1..=3));
        bad.contains(&a) || indep(&a)
    })
}

fn check_stability(rng: &mut InstanceRng) -> bool {
    let (t, y) = fin_instance(rng, 6);
    let d = finite::error_dimension(&t, &y).unwrap();
    let StabilityRadius::Finite(delta) = finite::stability_radius(&t, &y).unwrap() else {
        return d == 0;
    };
    let n = t.dim();
    (0..20).all(|_| {
        let e = Matrix::from_rows((0..n).map(|_| (0..n).map(|_| random_below(rng, &delta)).collect()).collect()).unwrap();
        let perturbed = FinOperator::new(t.matrix().add(&e).unwrap()).unwrap();
        finite::error_dimension(&perturbed, &y).unwrap() >= d
    })
}

fn check_truncation(rng: &mut InstanceRng) -> bool {
    let (t, y) = random_sequence_instance(rng);
    let (lo, hi) = truncation_window(&t, &y);
    let dense = FinOperator::new(t.truncate(lo, hi)).unwrap();
    finite::error_dimension(&dense, &truncate_space(&y, lo, hi)).unwrap() == seq_error_dimension(&t, &y)
}

const GROWTH_DEPTH: usize = 4;

fn check_power_growth(rng: &mut InstanceRng) -> bool {
    let (t, y) = random_sequence_instance(rng);
    let d = seq_error_dimension(&t, &y);
    if d == 0 {
        return true;
    }
    let (mut down, mut up) = (y.clone(), y.clone());
    for _ in 0..GROWTH_DEPTH {
        down = seq_going_down(&t, &down);
        up = seq_going_up(&t, &up);
        if seq_error_dimension(&t, &down) < d || seq_error_dimension(&t, &up) < d {
            return true;
        }
    }
    power_error_profile(&t, &y, GROWTH_DEPTH)
        .iter()
        .enumerate()
        .all(|(m, &dm)| dm > m)
}

fn check_extraction(rng: &mut InstanceRng) -> bool {
    let (t, y) = random_sequence_instance(rng);
    let trace = extract_invariant(&t, &y, 8);
    match &trace.outcome {
        Outcome::Invariant(z) => seq_is_invariant(&t, z),
        Outcome::NoReductionFound { depth, profile } => profile.len() == *depth,
    }
}

/// `{B, p(B)}` for a random banded `B` and a polynomial `p` without
/// constant term; such pairs commute.
pub fn random_commuting_pair(rng: &mut impl Rng) -> (BandedOperator, BandedOperator) {
    let b = if rng.gen_bool(0.4) { random_finite_rank_banded(rng) } else { random_banded(rng) };
    let mut p = BandedOperator::zero();
    let mut power = BandedOperator::identity();
    for _ in 0..rng.gen_range(1..=3) {
        power = b.compose(&power);
        p = p.add(&power.scale(&random_scalar(rng)));
    }
    (b, p)
}

fn check_commuting_preservation(rng: &mut InstanceRng) -> bool {
    let (b, p) = random_commuting_pair(rng);
    let y = random_window_space(rng);
    let a = AlgebraPresentation::new("pair", vec![b.clone(), p.clone()]).unwrap();
    match extract_invariant_commuting(&a, &y, 6) {
        Ok(trace) => match trace.outcome {
            CommutingOutcome::Invariant(z) => seq_is_invariant(&b, &z) && seq_is_invariant(&p, &z),
            CommutingOutcome::NoReductionFound { .. } => true,
        },
        Err(AlgebraError::PreservationViolated { .. } | AlgebraError::NotCommuting { .. }) => false,
        Err(_) => false,
    }
}

/// Runs every lemma check on `instances` seeded instances each.
pub fn run_lemmas(seed: u64, instances: usize) -> LemmaReport {
    let rows = vec![
        tally("quotient-rank", seed, 1, instances, check_quotient),
        tally("minimal-error-space", seed, 2, instances, check_minimal_error_space),
        tally("witness-bound", seed, 3, instances, check_witness_bound),
        tally("down-up-codim (finite)", seed, 4, instances, check_down_up_finite),
        tally("down-up-codim (sequence)", seed, 5, instances, check_down_up_sequence),
        tally("rank-nullity", seed, 6, instances, check_rank_nullity),
        tally("bad-alpha", seed, 7, instances, check_bad_alpha),
        tally("lower-semicontinuity", seed, 8, instances, check_stability),
        tally("truncation", seed, 9, instances, check_truncation),
        tally("power-growth", seed, 10, instances, check_power_growth),
        tally("extraction", seed, 11, instances, check_extraction),
        tally("commuting-preservation", seed, 12, instances, check_commuting_preservation),
    ];
    LemmaReport { seed, rows }
}

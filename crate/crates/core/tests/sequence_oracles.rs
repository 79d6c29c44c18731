mod common;

use common::{bareiss_rank, dense_apply, dense_columns, dense_vec, in_span, seq_d_oracle, truncated_generators};
use halfspace::finite::{self, FinOperator};
use halfspace::linalg::{int, Matrix, Scalar, Subspace};
use halfspace::sequence::{
    extract_invariant, power_error_profile, seq_error_dimension, seq_going_down, seq_going_up, seq_is_invariant,
    BandedOperator, MoveKind, Outcome, SparseVec, WindowTailSpace,
};
use halfspace::verify::{random_banded, random_scalar, random_sequence_instance, rng_for};
use rand::Rng;

fn e(i: i64) -> SparseVec {
    SparseVec::unit(i)
}

/// `T e_0 = e_1`, `T e_-1 = e_2`, `S e_0 = e_3`, zero elsewhere.
fn example_pair() -> (BandedOperator, BandedOperator) {
    let t = BandedOperator::from_columns([(0, e(1)), (-1, e(2))]);
    let s = BandedOperator::from_columns([(0, e(3))]);
    (t, s)
}

fn perturbed_tail() -> WindowTailSpace {
    let v = SparseVec::from_pairs([(0, int(1)), (5, int(1))]);
    WindowTailSpace::new(-1, [v]).unwrap()
}

fn random_sparse(rng: &mut impl Rng, lo: i64, hi: i64) -> SparseVec {
    let mut v = SparseVec::zero();
    for i in lo..=hi {
        if rng.gen_bool(0.5) {
            v.add_at(i, &random_scalar(rng));
        }
    }
    v
}

/// A random finitely supported member of `y`, built from its generators near
/// the cutoff.
fn random_member(rng: &mut impl Rng, y: &WindowTailSpace) -> SparseVec {
    let mut v = random_sparse(rng, y.cutoff() - 4, y.cutoff());
    for w in y.window() {
        v.add_scaled(w, &random_scalar(rng));
    }
    v
}

#[test]
fn apply_examples() {
    assert_eq!(BandedOperator::shift(1).apply(&e(0)), e(1));
    let (t, s) = example_pair();
    assert_eq!(t.apply(&e(-1)), e(2));
    assert_eq!(t.apply(&e(0)), e(1));
    assert_eq!(s.apply(&e(0)), e(3));
    assert!(t.apply(&e(5)).is_zero());
}

#[test]
fn apply_matches_dense_truncation() {
    let mut rng = rng_for(30, 0);
    for _ in 0..300 {
        let t = random_banded(&mut rng);
        let x = random_sparse(&mut rng, -6, 6);
        let (lo, hi) = (-6 - 3, 6 + 3);
        let got = t.apply(&x);
        let want = dense_apply(&dense_columns(&t, lo, hi), &dense_vec(&x, lo, hi));
        assert_eq!(dense_vec(&got, lo, hi), want);
        if let (Some(a), Some(b)) = (got.min_index(), got.max_index()) {
            assert!(a >= x.min_index().unwrap() + t.lower_offset().unwrap());
            assert!(b <= x.max_index().unwrap() + t.upper_offset().unwrap());
        }
    }
}

#[test]
fn compose_examples() {
    assert_eq!(BandedOperator::shift(1).compose(&BandedOperator::shift(1)), BandedOperator::shift(2));
    let (t, s) = example_pair();
    for p in [t.compose(&s), s.compose(&t), t.compose(&t), s.compose(&s)] {
        assert!(p.is_zero());
    }
    assert_eq!(t.power(2), BandedOperator::zero());
}

#[test]
fn compose_agrees_with_sequential_application() {
    let mut rng = rng_for(31, 0);
    for _ in 0..100 {
        let a = random_banded(&mut rng);
        let b = random_banded(&mut rng);
        let ab = a.compose(&b);
        if let (Some(lo), Some(hi)) = (ab.lower_offset(), ab.upper_offset()) {
            assert!(lo >= a.lower_offset().unwrap() + b.lower_offset().unwrap());
            assert!(hi <= a.upper_offset().unwrap() + b.upper_offset().unwrap());
        }
        let sum = a.add(&b);
        let half = a.scale(&Scalar::new(1.into(), 2.into()));
        for _ in 0..20 {
            let x = random_sparse(&mut rng, -8, 8);
            assert_eq!(ab.apply(&x), a.apply(&b.apply(&x)));
            let mut ax = a.apply(&x);
            ax.add_scaled(&b.apply(&x), &int(1));
            assert_eq!(sum.apply(&x), ax);
            assert_eq!(half.apply(&x), a.apply(&x).scaled(&Scalar::new(1.into(), 2.into())));
        }
        let cube = a.power(3);
        let x = random_sparse(&mut rng, -4, 4);
        assert_eq!(cube.apply(&x), a.apply(&a.apply(&a.apply(&x))));
    }
}

#[test]
fn d_agrees_with_dense_oracle() {
    let mut rng = rng_for(32, 0);
    for _ in 0..400 {
        let (t, y) = random_sequence_instance(&mut rng);
        assert_eq!(seq_error_dimension(&t, &y), seq_d_oracle(&t, &y), "{t:?} {y}");
    }
}

#[test]
fn d_agrees_with_finite_model_on_truncation() {
    let mut rng = rng_for(33, 0);
    for _ in 0..200 {
        let (t, y) = random_sequence_instance(&mut rng);
        let (lo, hi) = common::oracle_window(&t, &y, 3);
        let n = (hi - lo + 1) as usize;
        let op = FinOperator::new(Matrix::from_columns(n, &dense_columns(&t, lo, hi)).unwrap()).unwrap();
        let space = Subspace::span(n, &truncated_generators(&y, lo, hi)).unwrap();
        let d_fin = finite::error_dimension(&op, &space).unwrap();
        assert_eq!(seq_error_dimension(&t, &y), d_fin);
    }
}

#[test]
fn d_examples() {
    let (t, s) = example_pair();
    let y = WindowTailSpace::tail(0);
    assert_eq!(seq_error_dimension(&BandedOperator::shift(1), &y), 1);
    assert_eq!(seq_error_dimension(&t, &y), 2);
    assert_eq!(seq_error_dimension(&s, &y), 1);
    assert_eq!(seq_error_dimension(&BandedOperator::shift(-1), &perturbed_tail()), 1);
    assert_eq!(seq_d_oracle(&BandedOperator::shift(-1), &perturbed_tail()), 1);
}

#[test]
fn going_down_and_up_examples() {
    let (t, _) = example_pair();
    let y = WindowTailSpace::tail(0);
    assert_eq!(seq_going_down(&BandedOperator::shift(1), &y), WindowTailSpace::tail(-1));
    assert_eq!(seq_going_down(&t, &y), WindowTailSpace::tail(-2));
    assert_eq!(seq_going_down(&BandedOperator::shift(-1), &perturbed_tail()), WindowTailSpace::tail(-1));
    assert_eq!(seq_going_up(&t, &y), WindowTailSpace::tail(2));
    assert_eq!(seq_going_up(&BandedOperator::zero(), &perturbed_tail()), perturbed_tail());
    assert!(seq_is_invariant(&BandedOperator::shift(-1), &y));
    assert!(!seq_is_invariant(&BandedOperator::shift(1), &y));
}

#[test]
fn codim_identities_and_membership() {
    let mut rng = rng_for(34, 0);
    for _ in 0..300 {
        let (t, y) = random_sequence_instance(&mut rng);
        let d = seq_d_oracle(&t, &y);
        let down = seq_going_down(&t, &y);
        let up = seq_going_up(&t, &y);
        assert!(down.is_canonical() && up.is_canonical());
        assert_eq!(down.codim_in(&y).unwrap(), d);
        assert_eq!(y.codim_in(&up).unwrap(), d);
        for _ in 0..10 {
            let x = random_member(&mut rng, &down);
            assert!(y.contains(&x));
            assert!(y.contains(&t.apply(&x)));
            let x = random_member(&mut rng, &y);
            assert!(up.contains(&x));
            assert!(up.contains(&t.apply(&x)));
        }
        if d > 0 {
            assert_ne!(down, y);
            assert_ne!(up, y);
        } else {
            assert_eq!(down, y);
            assert_eq!(up, y);
        }
    }
}

/// `d(Y, T^m)` for the forward shift from a width-32 dense truncation,
/// powering the dense matrix rather than the operator.
fn shift_profile_oracle(m_max: usize) -> Vec<usize> {
    let (lo, hi) = (-16, 15);
    let shift = dense_columns(&BandedOperator::shift(1), lo, hi);
    let gens = truncated_generators(&WindowTailSpace::tail(0), lo, hi);
    let mut images = gens.clone();
    (1..=m_max)
        .map(|_| {
            images = images.iter().map(|g| dense_apply(&shift, g)).collect();
            let mut all = gens.clone();
            all.extend(images.iter().cloned());
            bareiss_rank(&all) - bareiss_rank(&gens)
        })
        .collect()
}

#[test]
fn power_profiles() {
    let y = WindowTailSpace::tail(0);
    let profile = power_error_profile(&BandedOperator::shift(1), &y, 12);
    assert_eq!(profile, (1..=12).collect::<Vec<_>>());
    assert_eq!(profile, shift_profile_oracle(12));
    let (t, _) = example_pair();
    assert_eq!(power_error_profile(&t, &y, 5), vec![2, 0, 0, 0, 0]);
    assert_eq!(power_error_profile(&BandedOperator::zero(), &y, 4), vec![0; 4]);
}

#[test]
fn extraction_examples() {
    let (t, _) = example_pair();
    let trace = extract_invariant(&t, &WindowTailSpace::tail(0), 16);
    assert_eq!(trace.initial_d, 2);
    assert_eq!(trace.moves.len(), 1);
    assert_eq!(trace.moves[0].kind, MoveKind::Down);
    assert_eq!(trace.outcome, Outcome::Invariant(WindowTailSpace::tail(-2)));
    assert_eq!(seq_d_oracle(&t, &WindowTailSpace::tail(-2)), 0);

    let b = BandedOperator::shift(-1);
    let trace = extract_invariant(&b, &perturbed_tail(), 16);
    assert_eq!(trace.moves.len(), 1);
    assert_eq!(trace.moves[0].kind, MoveKind::Down);
    assert_eq!(trace.outcome, Outcome::Invariant(WindowTailSpace::tail(-1)));

    let trace = extract_invariant(&BandedOperator::shift(1), &WindowTailSpace::tail(0), 10);
    assert_eq!(trace.outcome, Outcome::NoReductionFound { depth: 10, profile: (1..=10).collect() });
}

#[test]
fn extraction_postcondition_on_random_instances() {
    let mut rng = rng_for(35, 0);
    for _ in 0..150 {
        let (t, y) = random_sequence_instance(&mut rng);
        let trace = extract_invariant(&t, &y, 6);
        let mut prev = (y.clone(), seq_error_dimension(&t, &y));
        for mv in &trace.moves {
            assert_eq!(mv.space_after, mv.kind.apply(&t, &prev.0));
            assert_eq!(mv.d_after, seq_d_oracle(&t, &mv.space_after));
            prev = (mv.space_after.clone(), mv.d_after);
        }
        match &trace.outcome {
            Outcome::Invariant(z) => {
                assert!(seq_is_invariant(&t, z));
                assert_eq!(seq_d_oracle(&t, z), 0);
                assert_eq!(z, &prev.0);
            }
            Outcome::NoReductionFound { depth, profile } => {
                assert_eq!(*depth, 6);
                assert_eq!(profile, &power_error_profile(&t, &prev.0, 6));
            }
        }
    }
}

#[test]
fn down_chain_descends() {
    let mut rng = rng_for(36, 0);
    for _ in 0..100 {
        let (t, y) = random_sequence_instance(&mut rng);
        let mut cur = y;
        for _ in 0..4 {
            let next = seq_going_down(&t, &cur);
            assert!(next.is_subspace_of(&cur));
            if seq_error_dimension(&t, &cur) == 0 {
                assert_eq!(next, cur);
                break;
            }
            assert!(next.codim_in(&cur).unwrap() >= 1);
            cur = next;
        }
    }
}

#[test]
fn power_growth_when_chains_stall() {
    const K: usize = 4;
    let mut rng = rng_for(37, 0);
    let mut checked = 0;
    for _ in 0..300 {
        let (t, y) = random_sequence_instance(&mut rng);
        let d = seq_error_dimension(&t, &y);
        if d == 0 {
            continue;
        }
        let (mut down, mut up) = (y.clone(), y.clone());
        let mut stuck = true;
        for _ in 0..K {
            down = seq_going_down(&t, &down);
            up = seq_going_up(&t, &up);
            if seq_error_dimension(&t, &down) < d || seq_error_dimension(&t, &up) < d {
                stuck = false;
                break;
            }
        }
        if stuck {
            checked += 1;
            let profile = power_error_profile(&t, &y, K);
            for (m, dm) in profile.iter().enumerate() {
                assert!(*dm >= m + 1, "{t:?} {y} {profile:?}");
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn window_vectors_are_sparse_members() {
    // the window of a random space, densified, stays independent modulo the tail
    let mut rng = rng_for(38, 0);
    for _ in 0..100 {
        let (_, y) = random_sequence_instance(&mut rng);
        let (lo, hi) = (y.cutoff() - 2, y.cutoff() + 8);
        let gens = truncated_generators(&y, lo, hi);
        assert_eq!(bareiss_rank(&gens), (y.cutoff() - lo + 1) as usize + y.window_dim());
        for w in y.window() {
            assert!(in_span(&gens, &dense_vec(w, lo, hi)));
            assert!(w.min_index().unwrap() > y.cutoff());
        }
    }
}

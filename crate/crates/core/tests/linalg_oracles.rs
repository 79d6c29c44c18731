mod common;

use common::{bareiss_rank, in_span};
use halfspace::linalg::{self, frac, int, Matrix, Scalar, Subspace};
use halfspace::verify::{random_vector, rng_for};
use rand::Rng;

fn random_columns(rng: &mut impl Rng, rows: usize, cols: usize) -> Vec<Vec<Scalar>> {
    let rank = rng.gen_range(0..=rows.min(cols));
    let basis: Vec<Vec<Scalar>> = (0..rank).map(|_| random_vector(rng, rows)).collect();
    (0..cols)
        .map(|_| {
            let mut v = vec![int(0); rows];
            for b in &basis {
                let c = frac(rng.gen_range(-2..=2), rng.gen_range(1..=2));
                for (x, y) in v.iter_mut().zip(b) {
                    *x += &c * y;
                }
            }
            v
        })
        .collect()
}

#[test]
fn bareiss_oracle_on_known_ranks() {
    let cols = vec![vec![int(1), int(2), int(3)], vec![int(2), int(4), int(6)], vec![int(0), int(1), int(1)]];
    assert_eq!(bareiss_rank(&cols), 2);
    assert_eq!(bareiss_rank(&[vec![int(0), int(0)]]), 0);
    assert_eq!(bareiss_rank(&[vec![frac(1, 2), frac(1, 3)], vec![int(3), int(2)]]), 1);
    assert_eq!(bareiss_rank(&[]), 0);
}

#[test]
fn rank_agrees_with_fraction_free_elimination() {
    let mut rng = rng_for(11, 0);
    for _ in 0..400 {
        let rows = rng.gen_range(1..=7);
        let cols = rng.gen_range(1..=7);
        let c = random_columns(&mut rng, rows, cols);
        let m = Matrix::from_columns(rows, &c).unwrap();
        assert_eq!(linalg::rank(&m), bareiss_rank(&c), "{m:?}");
    }
}

#[test]
fn reduce_satisfies_rank_nullity_and_kernel_is_kernel() {
    let mut rng = rng_for(12, 0);
    for _ in 0..300 {
        let rows = rng.gen_range(1..=6);
        let cols = rng.gen_range(1..=7);
        let m = Matrix::from_columns(rows, &random_columns(&mut rng, rows, cols)).unwrap();
        let r = linalg::reduce(&m);
        assert_eq!(r.rank + r.kernel.dim(), cols);
        for k in r.kernel.basis() {
            assert!(m.mul_vec(k).unwrap().iter().all(|x| *x == int(0)));
        }
        // row space of m equals the row space from the reduction
        for i in 0..rows {
            assert!(in_span(r.row_space.basis(), m.row(i)));
        }
    }
}

#[test]
fn sum_and_intersection_dimension_formula() {
    let mut rng = rng_for(13, 0);
    for _ in 0..300 {
        let n = rng.gen_range(1..=7);
        let (ka, kb) = (rng.gen_range(0..=n), rng.gen_range(0..=n));
        let a_gen = random_columns(&mut rng, n, ka);
        let b_gen = random_columns(&mut rng, n, kb);
        let a = Subspace::span(n, &a_gen).unwrap();
        let b = Subspace::span(n, &b_gen).unwrap();
        let s = linalg::subspace_sum(&a, &b).unwrap();
        let i = linalg::subspace_intersect(&a, &b).unwrap();
        assert_eq!(a.dim(), bareiss_rank(&a_gen));
        let mut both = a_gen.clone();
        both.extend(b_gen.iter().cloned());
        assert_eq!(s.dim(), bareiss_rank(&both));
        assert_eq!(s.dim() + i.dim(), a.dim() + b.dim());
        // brute-force membership of the intersection
        for v in i.basis() {
            assert!(in_span(&a_gen, v) && in_span(&b_gen, v));
        }
        assert_eq!(linalg::codim_in(&i, &a).unwrap(), a.dim() - i.dim());
    }
}

#[test]
fn span_is_canonical() {
    let mut rng = rng_for(14, 0);
    for _ in 0..200 {
        let n = rng.gen_range(1..=6);
        let k = rng.gen_range(0..=n);
        let gens = random_columns(&mut rng, n, k);
        let a = Subspace::span(n, &gens).unwrap();
        // the same span from random combinations plus the original vectors
        let mut mixed = Vec::new();
        for _ in 0..gens.len() {
            let mut v = vec![int(0); n];
            for g in &gens {
                let c = int(rng.gen_range(-3..=3));
                for (x, y) in v.iter_mut().zip(g) {
                    *x += &c * y;
                }
            }
            mixed.push(v);
        }
        mixed.extend(gens.iter().rev().cloned());
        let b = Subspace::span(n, &mixed).unwrap();
        assert_eq!(a, b);
        assert!(a.is_canonical());
    }
}

#[test]
fn codim_reports_witness_when_not_contained() {
    let a = Subspace::coordinate(3, [0, 1]);
    let b = Subspace::coordinate(3, [1]);
    let Err(linalg::LinalgError::NotContained { witness }) = linalg::codim_in(&a, &b) else {
        panic!("containment should fail");
    };
    assert!(a.contains(&witness).unwrap());
    assert!(!b.contains(&witness).unwrap());
    assert_eq!(linalg::codim_in(&b, &a).unwrap(), 1);
}

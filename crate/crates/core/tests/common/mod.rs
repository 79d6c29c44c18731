//! Oracles shared by the integration tests. None of them goes through the
//! library's echelon forms or quotient maps.

#![allow(dead_code)]

use std::fs;
use std::path::Path;
use std::process::Command;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use halfspace::cli::{parse_problem, task_argv};
use halfspace::finite::FinOperator;
use halfspace::linalg::{Scalar, Subspace};
use halfspace::sequence::{BandedOperator, SparseVec, WindowTailSpace};

/// Rank of the matrix with the given columns, by fraction-free (Bareiss)
/// elimination over the integers after clearing denominators per column.
pub fn bareiss_rank(columns: &[Vec<Scalar>]) -> usize {
    let Some(rows) = columns.first().map(Vec::len) else {
        return 0;
    };
    let mut m: Vec<Vec<BigInt>> = (0..rows).map(|_| Vec::with_capacity(columns.len())).collect();
    for col in columns {
        let l = col.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        for (r, x) in col.iter().enumerate() {
            m[r].push(x.numer() * (&l / x.denom()));
        }
    }
    let cols = columns.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..rows {
            for j in c + 1..cols {
                let v = (&m[rank][c] * &m[r][j] - &m[r][c] * &m[rank][j]) / &prev;
                m[r][j] = v;
            }
            m[r][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

pub fn columns_of(m: &halfspace::linalg::Matrix) -> Vec<Vec<Scalar>> {
    (0..m.cols()).map(|j| m.column(j)).collect()
}

pub fn mat_vec(t: &FinOperator, v: &[Scalar]) -> Vec<Scalar> {
    let m = t.matrix();
    (0..m.rows()).map(|i| (0..m.cols()).fold(Scalar::zero(), |acc, j| acc + &m[(i, j)] * &v[j])).collect()
}

/// `d(Y, T) = rank[Y | TY] - rank Y`.
pub fn d_oracle(t: &FinOperator, y: &[Vec<Scalar>]) -> usize {
    let mut cols = y.to_vec();
    cols.extend(y.iter().map(|v| mat_vec(t, v)));
    bareiss_rank(&cols) - bareiss_rank(y)
}

pub fn d_oracle_space(t: &FinOperator, y: &Subspace) -> usize {
    d_oracle(t, y.basis())
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span(basis: &[Vec<Scalar>], v: &[Scalar]) -> bool {
    let mut cols = basis.to_vec();
    cols.push(v.to_vec());
    bareiss_rank(&cols) == bareiss_rank(basis)
}

/// Dense compression of `T` to indices `lo..=hi`, built entry by entry from
/// the diagonal values. Columns are returned.
pub fn dense_columns(t: &BandedOperator, lo: i64, hi: i64) -> Vec<Vec<Scalar>> {
    let n = (hi - lo + 1) as usize;
    (lo..=hi)
        .map(|j| {
            let mut col = vec![Scalar::zero(); n];
            for (&k, spec) in t.diagonals() {
                let i = j + k;
                if (lo..=hi).contains(&i) {
                    col[(i - lo) as usize] = spec.value(j);
                }
            }
            col
        })
        .collect()
}

pub fn dense_vec(v: &SparseVec, lo: i64, hi: i64) -> Vec<Scalar> {
    (lo..=hi).map(|i| v.get(i)).collect()
}

pub fn dense_apply(cols: &[Vec<Scalar>], v: &[Scalar]) -> Vec<Scalar> {
    let n = cols.first().map_or(0, Vec::len);
    let mut out = vec![Scalar::zero(); n];
    for (c, x) in cols.iter().zip(v) {
        if x.is_zero() {
            continue;
        }
        for (o, a) in out.iter_mut().zip(c) {
            *o += a * x;
        }
    }
    out
}

/// Generators of `Y` restricted to `lo..=hi`.
pub fn truncated_generators(y: &WindowTailSpace, lo: i64, hi: i64) -> Vec<Vec<Scalar>> {
    let n = (hi - lo + 1) as usize;
    let mut gens: Vec<Vec<Scalar>> = (lo..=y.cutoff())
        .map(|i| {
            let mut e = vec![Scalar::zero(); n];
            e[(i - lo) as usize] = Scalar::one();
            e
        })
        .collect();
    gens.extend(y.window().map(|w| dense_vec(w, lo, hi)));
    gens
}

/// Index window wide enough for the dense oracle, padded by `pad`.
pub fn oracle_window(t: &BandedOperator, y: &WindowTailSpace, pad: i64) -> (i64, i64) {
    let up = t.upper_offset().unwrap_or(0).max(0);
    let down = (-t.lower_offset().unwrap_or(0)).max(0);
    let top = y.window().filter_map(SparseVec::max_index).max().unwrap_or(y.cutoff()).max(y.cutoff());
    (y.cutoff() - up - down - pad, top + up + pad)
}

/// `d(Y, T)` on a dense truncation: `rank[Y_W | T_W Y_W] - rank Y_W`.
pub fn seq_d_oracle(t: &BandedOperator, y: &WindowTailSpace) -> usize {
    let (lo, hi) = oracle_window(t, y, 2);
    let cols = dense_columns(t, lo, hi);
    let gens = truncated_generators(y, lo, hi);
    let mut all = gens.clone();
    all.extend(gens.iter().map(|g| dense_apply(&cols, g)));
    bareiss_rank(&all) - bareiss_rank(&gens)
}

pub fn bundled_files(crate_dir: &Path) -> Vec<String> {
    let mut files: Vec<String> = fs::read_dir(crate_dir.join("examples"))
        .unwrap()
        .filter_map(|e| {
            let name = e.unwrap().file_name().into_string().unwrap();
            name.ends_with(".json").then(|| format!("examples/{name}"))
        })
        .collect();
    files.sort();
    files
}

/// Runs every task of a bundled file through the binary.
pub fn transcript(crate_dir: &Path, file: &str) -> String {
    let text = fs::read_to_string(crate_dir.join(file)).unwrap();
    let problem = parse_problem(&text).unwrap_or_else(|e| panic!("{file}: {e}"));
    let mut out = String::new();
    for task in &problem.tasks {
        let argv = task_argv(file, task);
        let run = Command::new(env!("CARGO_BIN_EXE_halfspace"))
            .args(&argv)
            .current_dir(crate_dir)
            .env_remove("HALFSPACE_SEED")
            .output()
            .unwrap();
        out.push_str(&format!("$ halfspace {}\n", argv.join(" ")));
        out.push_str(&String::from_utf8(run.stdout).unwrap());
        if !run.status.success() {
            let err = String::from_utf8(run.stderr).unwrap();
            out.push_str(&format!("[exit {}] {err}", run.status.code().unwrap_or(-1)));
        }
    }
    out
}

pub fn golden_path(crate_dir: &Path, file: &str) -> std::path::PathBuf {
    let stem = Path::new(file).file_stem().unwrap().to_str().unwrap();
    crate_dir.join("examples/golden").join(format!("{stem}.txt"))
}

//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes a sequence-model problem file as JSON text and returns
//! a JSON document; failures come back as `{"error": "..."}`.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use halfspace::algebra::{word_sample_bound, AlgebraPresentation};
use halfspace::cli::{parse_problem, Model};
use halfspace::linalg::format_scalar;
use halfspace::sequence::{
    extract_invariant, power_error_profile, seq_error_dimension, BandedOperator, Outcome, WindowTailSpace,
};

type Operators = BTreeMap<String, BandedOperator>;
type Spaces = BTreeMap<String, WindowTailSpace>;

fn load(problem: &str) -> Result<(Operators, Spaces), String> {
    match parse_problem(problem).map_err(|e| e.to_string())?.model {
        Model::Sequence { operators, subspaces } => Ok((operators, subspaces)),
        Model::Finite { .. } => Err("the demo only handles sequence-model problems".into()),
    }
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, name: &str, kind: &str) -> Result<&'a T, String> {
    map.get(name).ok_or_else(|| format!("unknown name '{name}' (no such {kind})"))
}

fn space_json(y: &WindowTailSpace) -> Value {
    json!({
        "cutoff": y.cutoff(),
        "window": y.window().map(ToString::to_string).collect::<Vec<_>>(),
        "text": y.to_string(),
    })
}

/// Nonzero matrix entries of `t` on rows and columns `lo..=hi`.
fn band_json(t: &BandedOperator, lo: i64, hi: i64) -> Value {
    let mut entries = Vec::new();
    for col in lo..=hi {
        for row in lo..=hi {
            let x = t.entry(row, col);
            if x != Default::default() {
                entries.push(json!({"row": row, "col": col, "value": format_scalar(&x)}));
            }
        }
    }
    json!({"lo": lo, "hi": hi, "entries": entries})
}

pub fn error_profile_value(problem: &str, op: &str, space: &str, m: usize) -> Result<Value, String> {
    let (ops, spaces) = load(problem)?;
    let t = lookup(&ops, op, "operator")?;
    let y = lookup(&spaces, space, "subspace")?;
    if m == 0 {
        return Err("m must be at least 1".into());
    }
    let c = y.cutoff();
    Ok(json!({
        "d": seq_error_dimension(t, y),
        "profile": power_error_profile(t, y, m),
        "space": space_json(y),
        "band": band_json(t, c - 6, c + 6),
    }))
}

pub fn reduce_value(problem: &str, op: &str, space: &str, max_depth: usize) -> Result<Value, String> {
    let (ops, spaces) = load(problem)?;
    let t = lookup(&ops, op, "operator")?;
    let y = lookup(&spaces, space, "subspace")?;
    let trace = extract_invariant(t, y, max_depth);
    let moves: Vec<Value> = trace
        .moves
        .iter()
        .map(|m| json!({"kind": m.kind.to_string(), "d": m.d_after, "space": space_json(&m.space_after)}))
        .collect();
    let outcome = match &trace.outcome {
        Outcome::Invariant(z) => json!({"invariant": space_json(z)}),
        Outcome::NoReductionFound { depth, profile } => json!({"depth": depth, "profile": profile}),
    };
    Ok(json!({
        "initial": space_json(&trace.initial),
        "initial_d": trace.initial_d,
        "moves": moves,
        "outcome": outcome,
        "text": trace.to_string(),
    }))
}

pub fn sample_bound_value(
    problem: &str,
    ops: &str,
    space: &str,
    degree: usize,
    samples: usize,
    seed: u64,
) -> Result<Value, String> {
    let (operators, spaces) = load(problem)?;
    let y = lookup(&spaces, space, "subspace")?;
    let names: Vec<String> = ops.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
    let gens = names.iter().map(|n| lookup(&operators, n, "operator").cloned()).collect::<Result<Vec<_>, _>>()?;
    let a = AlgebraPresentation::with_names("demo", gens, names).map_err(|e| e.to_string())?;
    let report = word_sample_bound(&a, y, degree, samples, seed).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| json!({"degree": r.degree, "words": r.words, "max_d": r.max_d, "argmax": r.argmax_word}))
        .collect();
    Ok(json!({
        "rows": rows,
        "max_d": report.max_d,
        "argmax": report.argmax_word,
        "certified_bound": report.certified_bound,
        "text": report.to_string(),
    }))
}

fn respond(result: Result<Value, String>) -> String {
    result.unwrap_or_else(|e| json!({"error": e})).to_string()
}

/// `d(Y, T^m)` for `m = 1..=m`, plus the band of `T` around the cutoff.
#[wasm_bindgen]
pub fn error_profile(problem: &str, op: &str, space: &str, m: usize) -> String {
    respond(error_profile_value(problem, op, space, m))
}

/// The going-down / going-up extraction trace.
#[wasm_bindgen]
pub fn reduce(problem: &str, op: &str, space: &str, max_depth: usize) -> String {
    respond(reduce_value(problem, op, space, max_depth))
}

/// Sampled word bound; `ops` is a comma-separated list of operator names.
#[wasm_bindgen]
pub fn sample_bound(problem: &str, ops: &str, space: &str, degree: usize, samples: usize, seed: u64) -> String {
    respond(sample_bound_value(problem, ops, space, degree, samples, seed))
}

//! Problem files: JSON documents naming operators, subspaces and tasks.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use super::Command;
use crate::finite::FinOperator;
use crate::linalg::{format_scalar, parse_scalar, Matrix, Scalar, Subspace};
use crate::sequence::{BandedOperator, DiagonalSpec, SparseVec, WindowTailSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Finite,
    Sequence,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Finite => "finite",
            ModelKind::Sequence => "sequence",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Model {
    Finite { dim: usize, operators: BTreeMap<String, FinOperator>, subspaces: BTreeMap<String, Subspace> },
    Sequence { operators: BTreeMap<String, BandedOperator>, subspaces: BTreeMap<String, WindowTailSpace> },
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Finite { .. } => ModelKind::Finite,
            Model::Sequence { .. } => ModelKind::Sequence,
        }
    }
}

/// One recorded command invocation; the fields mirror the CLI flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Task {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ops: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemFile {
    pub model: Model,
    pub tasks: Vec<Task>,
}

/// A parse failure located by field path and, when known, line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() || self.path == "." { "<root>" } else { &self.path };
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "{path} (line {l}, column {c}): {}", self.message),
            (Some(l), None) => write!(f, "{path} (line {l}): {}", self.message),
            _ => write!(f, "{path}: {}", self.message),
        }
    }
}

impl std::error::Error for Diagnostic {}

pub fn parse_problem(text: &str) -> Result<ProblemFile, Diagnostic> {
    #[derive(Deserialize)]
    struct Head {
        model: ModelKind,
    }
    let head: Head = from_str_located(text)?;
    match head.model {
        ModelKind::Finite => finite_from_wire(text, from_str_located(text)?),
        ModelKind::Sequence => sequence_from_wire(text, from_str_located(text)?),
    }
}

/// Normalized JSON: rationals in lowest terms, sorted names, canonical
/// subspace bases and diagonal specs.
pub fn serialize_problem(p: &ProblemFile) -> String {
    let json = match &p.model {
        Model::Finite { dim, operators, subspaces } => serde_json::to_string_pretty(&FiniteWire {
            model: ModelKind::Finite,
            dim: Some(*dim),
            operators: UniqueMap(
                operators.iter().map(|(k, t)| (k.clone(), rational_rows(&t.matrix().to_rows()))).collect(),
            ),
            subspaces: UniqueMap(subspaces.iter().map(|(k, y)| (k.clone(), rational_rows(y.basis()))).collect()),
            tasks: p.tasks.clone(),
        }),
        Model::Sequence { operators, subspaces } => serde_json::to_string_pretty(&SequenceWire {
            model: ModelKind::Sequence,
            operators: UniqueMap(operators.iter().map(|(k, t)| (k.clone(), diagonal_wires(t))).collect()),
            subspaces: UniqueMap(
                subspaces
                    .iter()
                    .map(|(k, y)| {
                        let window = y.window().map(|v| IndexMap(v.iter().map(|(i, x)| (i, Rational(x.clone()))).collect()));
                        (k.clone(), SpaceWire { cutoff: y.cutoff(), window: window.collect() })
                    })
                    .collect(),
            ),
            tasks: p.tasks.clone(),
        }),
    };
    json.expect("problem files always serialize") + "\n"
}

fn from_str_located<'de, T: Deserialize<'de>>(text: &'de str) -> Result<T, Diagnostic> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let (line, column) = (inner.line(), inner.column());
        let mut message = inner.to_string();
        let suffix = format!(" at line {line} column {column}");
        if let Some(stripped) = message.strip_suffix(&suffix) {
            message = stripped.to_string();
        }
        Diagnostic { path, line: (line > 0).then_some(line), column: (column > 0).then_some(column), message }
    })?;
    de.end().map_err(|e| Diagnostic {
        path: String::new(),
        line: Some(e.line()),
        column: Some(e.column()),
        message: "trailing characters".into(),
    })?;
    Ok(value)
}

/// Line of the first `"name"` key after the `"section"` key, for
/// diagnostics raised after deserialization.
fn locate(text: &str, section: &str, name: &str) -> Option<usize> {
    let start = text.find(&format!("\"{section}\""))?;
    let offset = text[start..].find(&format!("\"{name}\""))? + start;
    Some(text[..offset].matches('\n').count() + 1)
}

fn semantic(text: &str, section: &str, name: &str, message: String) -> Diagnostic {
    Diagnostic { path: format!("{section}.{name}"), line: locate(text, section, name), column: None, message }
}

/// A rational written as `"p/q"` or `"p"`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Rational(Scalar);

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_scalar(&s).map(Rational).map_err(de::Error::custom)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_scalar(&self.0))
    }
}

/// Name-keyed map rejecting duplicate keys.
#[derive(Debug, Clone, PartialEq, Eq)]
struct UniqueMap<V>(BTreeMap<String, V>);

impl<V> Default for UniqueMap<V> {
    fn default() -> Self {
        Self(BTreeMap::new())
    }
}

impl<'de, V: Deserialize<'de>> Deserialize<'de> for UniqueMap<V> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct NamesVisitor<V>(PhantomData<V>);
        impl<'de, V: Deserialize<'de>> Visitor<'de> for NamesVisitor<V> {
            type Value = UniqueMap<V>;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map of names")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut out = BTreeMap::new();
                while let Some(key) = map.next_key::<String>()? {
                    if out.contains_key(&key) {
                        return Err(de::Error::custom(format!("duplicate name '{key}'")));
                    }
                    let value = map.next_value()?;
                    out.insert(key, value);
                }
                Ok(UniqueMap(out))
            }
        }
        d.deserialize_map(NamesVisitor(PhantomData))
    }
}

impl<V: Serialize> Serialize for UniqueMap<V> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Index-keyed map; keys are signed decimal integers written as strings.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct IndexMap(BTreeMap<i64, Rational>);

impl<'de> Deserialize<'de> for IndexMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = UniqueMap::<Rational>::deserialize(d)?;
        let mut out = BTreeMap::new();
        for (k, v) in raw.0 {
            let i: i64 = k
                .parse()
                .ok()
                .filter(|_| !k.starts_with('+'))
                .ok_or_else(|| de::Error::custom(format!("index '{k}' is not a signed decimal integer")))?;
            if out.insert(i, v).is_some() {
                return Err(de::Error::custom(format!("duplicate index {i}")));
            }
        }
        Ok(IndexMap(out))
    }
}

impl Serialize for IndexMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        // numeric order, not string order
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(&k.to_string(), v)?;
        }
        m.end()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FiniteWire {
    model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(default)]
    operators: UniqueMap<Vec<Vec<Rational>>>,
    #[serde(default)]
    subspaces: UniqueMap<Vec<Vec<Rational>>>,
    #[serde(default)]
    tasks: Vec<Task>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceWire {
    model: ModelKind,
    #[serde(default)]
    operators: UniqueMap<Vec<DiagonalWire>>,
    #[serde(default)]
    subspaces: UniqueMap<SpaceWire>,
    #[serde(default)]
    tasks: Vec<Task>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagonalWire {
    offset: i64,
    #[serde(default = "zero_rational")]
    left_value: Rational,
    #[serde(default = "zero_rational")]
    right_value: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    left_end: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    right_start: Option<i64>,
    #[serde(default)]
    exceptions: IndexMap,
}

fn zero_rational() -> Rational {
    Rational(Scalar::from_integer(0.into()))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceWire {
    cutoff: i64,
    #[serde(default)]
    window: Vec<IndexMap>,
}

fn scalars(rows: &[Vec<Rational>]) -> Vec<Vec<Scalar>> {
    rows.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect()
}

fn rational_rows(rows: &[Vec<Scalar>]) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| r.iter().cloned().map(Rational).collect()).collect()
}

fn finite_from_wire(text: &str, w: FiniteWire) -> Result<ProblemFile, Diagnostic> {
    let inferred = w
        .dim
        .or_else(|| w.operators.0.values().next().map(Vec::len))
        .or_else(|| w.subspaces.0.values().find_map(|vs| vs.first().map(Vec::len)));
    let dim = match inferred {
        Some(n) => n,
        None if w.subspaces.0.is_empty() => 0,
        None => {
            return Err(Diagnostic {
                path: "dim".into(),
                line: None,
                column: None,
                message: "cannot infer the ambient dimension; add \"dim\"".into(),
            })
        }
    };
    let mut operators = BTreeMap::new();
    for (name, rows) in &w.operators.0 {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().position(|r| r.len() != cols) {
            let msg = format!("row {r} has {} entries, row 0 has {cols}", rows[r].len());
            return Err(semantic(text, "operators", name, msg));
        }
        if rows.len() != cols {
            let msg = format!("matrix must be square, got {}x{cols}", rows.len());
            return Err(semantic(text, "operators", name, msg));
        }
        if rows.len() != dim {
            let msg = format!("matrix is {0}x{0} but the ambient dimension is {dim}", rows.len());
            return Err(semantic(text, "operators", name, msg));
        }
        let m = Matrix::from_rows(scalars(rows)).expect("rows checked rectangular");
        operators.insert(name.clone(), FinOperator::new(m).expect("checked square"));
    }
    let mut subspaces = BTreeMap::new();
    for (name, vectors) in &w.subspaces.0 {
        if let Some(v) = vectors.iter().position(|v| v.len() != dim) {
            let msg = format!("vector {v} has {} entries, expected {dim}", vectors[v].len());
            return Err(semantic(text, "subspaces", name, msg));
        }
        let y = Subspace::span(dim, &scalars(vectors)).expect("lengths checked");
        subspaces.insert(name.clone(), y);
    }
    Ok(ProblemFile { model: Model::Finite { dim, operators, subspaces }, tasks: w.tasks })
}

fn diagonal_from_wire(d: &DiagonalWire) -> Result<DiagonalSpec, String> {
    let exc = &d.exceptions.0;
    let left_end = d.left_end.unwrap_or_else(|| match (exc.keys().next(), d.right_start) {
        (Some(&lo), _) => lo - 1,
        (None, Some(r)) => r - 1,
        (None, None) => -1,
    });
    let right_start = d
        .right_start
        .unwrap_or_else(|| exc.keys().next_back().map_or(left_end + 1, |&hi| hi + 1));
    let exceptions = exc.iter().map(|(&i, x)| (i, x.0.clone())).collect();
    DiagonalSpec::new(d.left_value.0.clone(), d.right_value.0.clone(), left_end, right_start, exceptions)
        .map_err(|e| format!("offset {}: {e}", d.offset))
}

fn diagonal_wires(t: &BandedOperator) -> Vec<DiagonalWire> {
    t.diagonals()
        .iter()
        .map(|(&offset, d)| DiagonalWire {
            offset,
            left_value: Rational(d.left_value().clone()),
            right_value: Rational(d.right_value().clone()),
            left_end: Some(d.left_end()),
            right_start: Some(d.right_start()),
            exceptions: IndexMap(d.exceptions().iter().map(|(&i, x)| (i, Rational(x.clone()))).collect()),
        })
        .collect()
}

fn sequence_from_wire(text: &str, w: SequenceWire) -> Result<ProblemFile, Diagnostic> {
    let mut operators = BTreeMap::new();
    for (name, diagonals) in &w.operators.0 {
        let mut specs = Vec::with_capacity(diagonals.len());
        for d in diagonals {
            let spec = diagonal_from_wire(d).map_err(|m| semantic(text, "operators", name, m))?;
            specs.push((d.offset, spec));
        }
        operators.insert(name.clone(), BandedOperator::new(specs));
    }
    let mut subspaces = BTreeMap::new();
    for (name, s) in &w.subspaces.0 {
        let window = s
            .window
            .iter()
            .map(|v| SparseVec::from_pairs(v.0.iter().map(|(&i, x)| (i, x.0.clone()))));
        let y = WindowTailSpace::new(s.cutoff, window).map_err(|e| semantic(text, "subspaces", name, e.to_string()))?;
        subspaces.insert(name.clone(), y);
    }
    Ok(ProblemFile { model: Model::Sequence { operators, subspaces }, tasks: w.tasks })
}

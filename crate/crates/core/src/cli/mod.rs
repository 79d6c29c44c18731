//! Command dispatch over problem files. Every command returns its report as
//! text so that runs can be compared byte for byte.

mod problem;

pub use problem::{parse_problem, serialize_problem, Diagnostic, Model, ModelKind, ProblemFile, Task};

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    extract_invariant_commuting, invariant_from_common_f, word_sample_bound, AlgebraError, AlgebraPresentation,
    ModelOperator,
};
use crate::finite::{self, FinOperator, FiniteError};
use crate::sequence::{
    extract_invariant, power_error_profile, seq_error_dimension, seq_going_down, seq_going_up,
    seq_minimal_error_collection, BandedOperator, DEFAULT_MAX_DEPTH,
};
use crate::verify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    D,
    MinF,
    Down,
    Up,
    Profile,
    Reduce,
    CommonF,
    ReduceCommuting,
    SampleBound,
    VerifyLemmas,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::D,
        Command::MinF,
        Command::Down,
        Command::Up,
        Command::Profile,
        Command::Reduce,
        Command::CommonF,
        Command::ReduceCommuting,
        Command::SampleBound,
        Command::VerifyLemmas,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::D => "d",
            Command::MinF => "min-f",
            Command::Down => "down",
            Command::Up => "up",
            Command::Profile => "profile",
            Command::Reduce => "reduce",
            Command::CommonF => "common-f",
            Command::ReduceCommuting => "reduce-commuting",
            Command::SampleBound => "sample-bound",
            Command::VerifyLemmas => "verify-lemmas",
        }
    }

    pub fn from_name(name: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Default sample count for `sample-bound`.
pub const DEFAULT_SAMPLES: usize = 100;
/// Default instance count per lemma for `verify-lemmas`.
pub const DEFAULT_INSTANCES: usize = 100;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunArgs {
    pub file: Option<PathBuf>,
    pub ops: Vec<String>,
    pub space: Option<String>,
    pub m: Option<usize>,
    pub max_depth: Option<usize>,
    pub degree: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub instances: Option<usize>,
}

impl RunArgs {
    /// The flags recorded in a problem-file task.
    pub fn from_task(file: &Path, task: &Task) -> Self {
        Self {
            file: Some(file.to_path_buf()),
            ops: task.ops.clone(),
            space: task.space.clone(),
            m: task.m,
            max_depth: task.max_depth,
            degree: task.degree,
            samples: task.samples,
            seed: task.seed,
            instances: None,
        }
    }
}

/// Command-line arguments (after the program name) that replay `task`
/// against the problem file at `file`.
pub fn task_argv(file: &str, task: &Task) -> Vec<String> {
    let mut argv = vec![task.command.name().to_string(), "--file".into(), file.to_string()];
    for op in &task.ops {
        argv.extend(["--op".into(), op.clone()]);
    }
    let flags = [
        ("--space", task.space.clone()),
        ("--m", task.m.map(|v| v.to_string())),
        ("--max-depth", task.max_depth.map(|v| v.to_string())),
        ("--degree", task.degree.map(|v| v.to_string())),
        ("--samples", task.samples.map(|v| v.to_string())),
        ("--seed", task.seed.map(|v| v.to_string())),
    ];
    for (flag, value) in flags {
        if let Some(v) = value {
            argv.extend([flag.to_string(), v]);
        }
    }
    argv
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub text: String,
    /// False when the command ran but an assertion failed (verify-lemmas).
    pub success: bool,
}

impl Report {
    fn ok(text: String) -> Self {
        Self { text, success: true }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {diagnostic}")]
    Parse { path: PathBuf, diagnostic: Diagnostic },
    #[error("missing required flag --{0}")]
    MissingFlag(&'static str),
    #[error("unknown name '{name}' (no such {kind})")]
    UnknownName { kind: &'static str, name: String },
    #[error("`{command}` needs a {expected}-model problem file, got a {found}-model one")]
    ModelMismatch { command: Command, expected: ModelKind, found: ModelKind },
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Finite(#[from] FiniteError),
}

pub fn load_problem(path: &Path) -> Result<ProblemFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_problem(&text).map_err(|diagnostic| CliError::Parse { path: path.to_path_buf(), diagnostic })
}

/// Runs `command`, reading the problem file named in `args` if it needs one.
pub fn run(command: Command, args: &RunArgs) -> Result<Report, CliError> {
    if command == Command::VerifyLemmas {
        return Ok(verify_report(args));
    }
    let path = args.file.as_deref().ok_or(CliError::MissingFlag("file"))?;
    let problem = load_problem(path)?;
    run_on(&problem, command, args)
}

/// Runs `command` against an already parsed problem.
pub fn run_on(problem: &ProblemFile, command: Command, args: &RunArgs) -> Result<Report, CliError> {
    if command == Command::VerifyLemmas {
        return Ok(verify_report(args));
    }
    match &problem.model {
        Model::Finite { operators, subspaces, .. } => run_finite(command, args, operators, subspaces),
        Model::Sequence { operators, subspaces } => run_sequence(command, args, operators, subspaces),
    }
}

fn verify_report(args: &RunArgs) -> Report {
    let report = verify::run_lemmas(args.seed.unwrap_or(0), args.instances.unwrap_or(DEFAULT_INSTANCES));
    Report { text: format!("{report}\n"), success: report.all_passed() }
}

fn lookup<'a, V>(map: &'a BTreeMap<String, V>, kind: &'static str, name: &str) -> Result<&'a V, CliError> {
    map.get(name).ok_or_else(|| CliError::UnknownName { kind, name: name.to_string() })
}

fn operators<'a, V>(map: &'a BTreeMap<String, V>, args: &RunArgs) -> Result<Vec<&'a V>, CliError> {
    if args.ops.is_empty() {
        return Err(CliError::MissingFlag("op"));
    }
    args.ops.iter().map(|n| lookup(map, "operator", n)).collect()
}

fn single<'a, V>(map: &'a BTreeMap<String, V>, args: &RunArgs) -> Result<&'a V, CliError> {
    match operators(map, args)?.as_slice() {
        [t] => Ok(t),
        _ => Err(CliError::InvalidArgument(format!("expected exactly one --op, got {}", args.ops.len()))),
    }
}

fn space<'a, S>(map: &'a BTreeMap<String, S>, args: &RunArgs) -> Result<&'a S, CliError> {
    let name = args.space.as_deref().ok_or(CliError::MissingFlag("space"))?;
    lookup(map, "subspace", name)
}

fn presentation<T: ModelOperator>(map: &BTreeMap<String, T>, args: &RunArgs) -> Result<AlgebraPresentation<T>, CliError> {
    let gens = operators(map, args)?.into_iter().cloned().collect();
    Ok(AlgebraPresentation::with_names(args.ops.join(","), gens, args.ops.clone())?)
}

fn d_report(args: &RunArgs, ds: &[usize]) -> String {
    if let [d] = ds {
        return format!("d = {d}\n");
    }
    args.ops.iter().zip(ds).map(|(n, d)| format!("d({n}) = {d}\n")).collect()
}

fn common_f_report<T: ModelOperator>(map: &BTreeMap<String, T>, y: &T::Space, args: &RunArgs) -> Result<String, CliError> {
    let c = invariant_from_common_f(&presentation(map, args)?, y)?;
    Ok(format!(
        "dim G = {}\nZ = {}\ncodim Y in Z = {}\nclosure rounds = {}\n",
        c.common_dim, c.space, c.extension_dim, c.closure_rounds
    ))
}

fn sample_report<T: ModelOperator>(map: &BTreeMap<String, T>, y: &T::Space, args: &RunArgs) -> Result<String, CliError> {
    let degree = args.degree.ok_or(CliError::MissingFlag("degree"))?;
    let samples = args.samples.unwrap_or(DEFAULT_SAMPLES);
    let r = word_sample_bound(&presentation(map, args)?, y, degree, samples, args.seed.unwrap_or(0))?;
    Ok(format!("{r}\n"))
}

fn profile_line(profile: &[usize]) -> String {
    let parts: Vec<String> = profile.iter().map(ToString::to_string).collect();
    parts.join(" ") + "\n"
}

fn run_finite(
    command: Command,
    args: &RunArgs,
    ops: &BTreeMap<String, FinOperator>,
    spaces: &BTreeMap<String, crate::linalg::Subspace>,
) -> Result<Report, CliError> {
    let mismatch = |command| CliError::ModelMismatch { command, expected: ModelKind::Sequence, found: ModelKind::Finite };
    let text = match command {
        Command::D => {
            let y = space(spaces, args)?;
            let ds = operators(ops, args)?
                .into_iter()
                .map(|t| finite::error_dimension(t, y))
                .collect::<Result<Vec<_>, _>>()?;
            d_report(args, &ds)
        }
        Command::MinF => {
            let y = space(spaces, args)?;
            let ts: Vec<FinOperator> = operators(ops, args)?.into_iter().cloned().collect();
            let w = finite::minimal_error_collection(&ts, y)?;
            format!("d = {}\nF = {}\n", w.d, w.error_space)
        }
        Command::Down | Command::Up => {
            let (t, y) = (single(ops, args)?, space(spaces, args)?);
            let d = finite::error_dimension(t, y)?;
            if command == Command::Down {
                format!("D = {}\ncodim = {d}\n", finite::going_down(t, y)?)
            } else {
                format!("U = {}\ncodim = {d}\n", finite::going_up(t, y)?)
            }
        }
        Command::Profile => {
            let (t, y) = (single(ops, args)?, space(spaces, args)?);
            let m = args.m.ok_or(CliError::MissingFlag("m"))?;
            let profile = (1..=m as u32)
                .map(|k| finite::error_dimension(&t.power(k), y))
                .collect::<Result<Vec<_>, _>>()?;
            profile_line(&profile)
        }
        Command::CommonF => common_f_report(ops, space(spaces, args)?, args)?,
        Command::SampleBound => sample_report(ops, space(spaces, args)?, args)?,
        Command::Reduce | Command::ReduceCommuting => return Err(mismatch(command)),
        Command::VerifyLemmas => unreachable!("handled in run_on"),
    };
    Ok(Report::ok(text))
}

fn run_sequence(
    command: Command,
    args: &RunArgs,
    ops: &BTreeMap<String, BandedOperator>,
    spaces: &BTreeMap<String, crate::sequence::WindowTailSpace>,
) -> Result<Report, CliError> {
    let text = match command {
        Command::D => {
            let y = space(spaces, args)?;
            let ds: Vec<usize> = operators(ops, args)?.into_iter().map(|t| seq_error_dimension(t, y)).collect();
            d_report(args, &ds)
        }
        Command::MinF => {
            let y = space(spaces, args)?;
            let ts: Vec<BandedOperator> = operators(ops, args)?.into_iter().cloned().collect();
            let (d, basis) = seq_minimal_error_collection(&ts, y);
            let parts: Vec<String> = basis.iter().map(ToString::to_string).collect();
            format!("d = {d}\nF = span{{{}}}\n", parts.join(", "))
        }
        Command::Down | Command::Up => {
            let (t, y) = (single(ops, args)?, space(spaces, args)?);
            let d = seq_error_dimension(t, y);
            if command == Command::Down {
                format!("D = {}\ncodim = {d}\n", seq_going_down(t, y))
            } else {
                format!("U = {}\ncodim = {d}\n", seq_going_up(t, y))
            }
        }
        Command::Profile => {
            let (t, y) = (single(ops, args)?, space(spaces, args)?);
            let m = args.m.ok_or(CliError::MissingFlag("m"))?;
            profile_line(&power_error_profile(t, y, m))
        }
        Command::Reduce => {
            let (t, y) = (single(ops, args)?, space(spaces, args)?);
            let trace = extract_invariant(t, y, args.max_depth.unwrap_or(DEFAULT_MAX_DEPTH));
            format!("{trace}\n")
        }
        Command::ReduceCommuting => {
            let y = space(spaces, args)?;
            let a = presentation(ops, args)?;
            let trace = extract_invariant_commuting(&a, y, args.max_depth.unwrap_or(DEFAULT_MAX_DEPTH))?;
            format!("{trace}\n")
        }
        Command::CommonF => common_f_report(ops, space(spaces, args)?, args)?,
        Command::SampleBound => sample_report(ops, space(spaces, args)?, args)?,
        Command::VerifyLemmas => unreachable!("handled in run_on"),
    };
    Ok(Report::ok(text))
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use halfspace::cli::{run, Command, RunArgs, DEFAULT_INSTANCES, DEFAULT_SAMPLES};
use halfspace::sequence::DEFAULT_MAX_DEPTH;

/// Almost-invariant half-spaces of operators, computed exactly.
#[derive(Parser)]
#[command(name = "halfspace", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Problem {
    /// Problem file (JSON)
    #[arg(long)]
    file: PathBuf,
    /// Operator name; repeat for several
    #[arg(long = "op", required = true)]
    ops: Vec<String>,
    /// Subspace name
    #[arg(long)]
    space: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Error dimension d(Y, T) for each operator
    D(Problem),
    /// Minimal common error space F
    MinF(Problem),
    /// Going down: {y in Y : Ty in Y}
    Down(Problem),
    /// Going up: Y + TY
    Up(Problem),
    /// d(Y, T^m) for m = 1..=M
    Profile {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        m: usize,
    },
    /// Extract an invariant half-space by going down/up moves
    Reduce {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
    },
    /// Invariant space built from the common error space
    CommonF(Problem),
    /// Staged extraction for commuting operators
    ReduceCommuting {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
    },
    /// Largest d over sampled words in the operators
    SampleBound {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, env = "HALFSPACE_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Check the lemmas on seeded random instances
    VerifyLemmas {
        #[arg(long, env = "HALFSPACE_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_INSTANCES)]
        instances: usize,
    },
}

fn problem_args(p: Problem) -> RunArgs {
    RunArgs { file: Some(p.file), ops: p.ops, space: Some(p.space), ..RunArgs::default() }
}

fn main() -> ExitCode {
    let (command, args) = match Cli::parse().command {
        Cmd::D(p) => (Command::D, problem_args(p)),
        Cmd::MinF(p) => (Command::MinF, problem_args(p)),
        Cmd::Down(p) => (Command::Down, problem_args(p)),
        Cmd::Up(p) => (Command::Up, problem_args(p)),
        Cmd::Profile { problem, m } => (Command::Profile, RunArgs { m: Some(m), ..problem_args(problem) }),
        Cmd::Reduce { problem, max_depth } => {
            (Command::Reduce, RunArgs { max_depth: Some(max_depth), ..problem_args(problem) })
        }
        Cmd::CommonF(p) => (Command::CommonF, problem_args(p)),
        Cmd::ReduceCommuting { problem, max_depth } => {
            (Command::ReduceCommuting, RunArgs { max_depth: Some(max_depth), ..problem_args(problem) })
        }
        Cmd::SampleBound { problem, degree, samples, seed } => (
            Command::SampleBound,
            RunArgs { degree: Some(degree), samples: Some(samples), seed: Some(seed), ..problem_args(problem) },
        ),
        Cmd::VerifyLemmas { seed, instances } => {
            (Command::VerifyLemmas, RunArgs { seed: Some(seed), instances: Some(instances), ..RunArgs::default() })
        }
    };
    match run(command, &args) {
        Ok(report) => {
            print!("{}", report.text);
            if report.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

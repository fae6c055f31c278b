//! `bjo`: Birkhoff-James orthogonality checks from JSON problem files.
//!
//! Exit codes: 0 orthogonal (certified), 3 not orthogonal (certified),
//! 4 inconclusive, 1 usage/IO/parse error, 2 invalid mathematical input.

mod commands;
mod fuzz;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bjo_core::io::IoError;
use bjo_core::Error;

pub const EXIT_ORTHOGONAL: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_INVALID_INPUT: u8 = 2;
pub const EXIT_NOT_ORTHOGONAL: u8 = 3;
pub const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Parser)]
#[command(name = "bjo", version, about = "Birkhoff-James orthogonality certificates for matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide T ⊥_B span(W) for every matrix listed under "W".
    CheckSubspace(CheckArgs),
    /// Decide T ⊥_B A for the single matrix A under "W".
    CheckPair(CheckArgs),
    /// Distance from T to span{A} with its lower bounds.
    Distance(DistanceArgs),
    /// Numerical-radius orthogonality T ⊥_w span(W) (complex field).
    NumradCheck(CheckArgs),
    /// Write a generated problem file.
    Gen(GenArgs),
    /// Random trials comparing the decision procedure with the oracle.
    Fuzz(FuzzArgs),
}

#[derive(Args)]
pub struct Common {
    /// Write the machine-readable report to this path.
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Separation threshold; falls back to BJO_TOL_DEC, then to the problem file.
    #[arg(long, value_name = "EPS")]
    pub tol_dec: Option<f64>,
    /// Seed for the randomized searches.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args)]
pub struct CheckArgs {
    /// Problem file.
    pub problem: PathBuf,
    #[command(flatten)]
    pub common: Common,
    /// Recompute every residual of the emitted certificate or witness.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args)]
pub struct DistanceArgs {
    /// Problem file with one matrix A under "W".
    pub problem: PathBuf,
    /// Distance to the span of A.
    #[arg(long, required = true)]
    pub span: bool,
    /// Also compute the sphere supremum (A must be bounded below).
    #[arg(long)]
    pub mta: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum GenKind {
    /// Orthogonal with a planted density certificate.
    Orthogonal,
    /// W contains T.
    Nonorthogonal,
    /// Random W against a unit-norm T with a k-fold top singular value.
    Random,
    /// Planted numerical-radius orthogonality (complex field).
    Numrad,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FieldArg {
    R,
    C,
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "orthogonal")]
    pub kind: GenKind,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, value_enum, default_value = "r")]
    pub field: FieldArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path (stdout when absent).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct FuzzArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Write the summary as JSON to this path.
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Separation threshold; falls back to BJO_TOL_DEC.
    #[arg(long, value_name = "EPS")]
    pub tol_dec: Option<f64>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::usage(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ShapeMismatch { .. } | Error::InvalidSpec(_) | Error::InvalidMatrix(_) => EXIT_USAGE,
            _ => EXIT_INVALID_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::CheckSubspace(a) => commands::check(a, false),
        Command::CheckPair(a) => commands::check(a, true),
        Command::Distance(a) => commands::distance(a),
        Command::NumradCheck(a) => commands::numrad(a),
        Command::Gen(a) => commands::gen(a),
        Command::Fuzz(a) => fuzz::run(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("bjo: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

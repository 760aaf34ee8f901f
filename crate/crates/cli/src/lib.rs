//! Command-line front end for `k3wild`.
//!
//! [`run`] parses arguments and returns the full [`Output`] of one
//! invocation, so the binary is a thin shell around it and tests can drive
//! every subcommand in-process.

pub mod commands;
pub mod fixtures;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use k3wild::enumerate::EnumerateError;
use k3wild::height::HeightError;
use k3wild::tate::TateError;
use k3wild::weierstrass::ModelError;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNSUPPORTED_CHARACTERISTIC: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("fixture: {0}")]
    Fixture(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Tate(#[from] TateError),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error(transparent)]
    Height(#[from] HeightError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(ModelError::UnsupportedCharacteristic(_))
            | CliError::Tate(TateError::UnsupportedCharacteristic(_)) => EXIT_UNSUPPORTED_CHARACTERISTIC,
            CliError::Enumerate(EnumerateError::UnsupportedPrime(p)) if *p < 5 => EXIT_UNSUPPORTED_CHARACTERISTIC,
            CliError::Model(ModelError::Degenerate) => EXIT_DEGENERATE,
            CliError::Tate(_) => EXIT_DEGENERATE,
            _ => EXIT_USAGE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "k3wild",
    version,
    about = "Singular fibers, heights and fiber configurations of elliptic K3 surfaces over F_p"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the singular fibers of a Weierstrass model.
    Analyze(AnalyzeArgs),
    /// Check the bundled example models against their expected fibers.
    VerifyExamples(VerifyArgs),
    /// List fiber configurations compatible with a wild Z/p action.
    Enumerate(EnumerateArgs),
    /// Contribution maxima, torsion scan and double-plane bound.
    Bounds(BoundsArgs),
    /// Height of a section from its intersection data.
    Height(HeightArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Model record file (`p`, `n`, `a1`..`a6`); `-` reads stdin.
    #[arg(required_unless_present = "example", conflicts_with = "example")]
    pub file: Option<PathBuf>,
    /// Analyze a bundled example by id, e.g. `5-(1)`.
    #[arg(long)]
    pub example: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run a single example.
    #[arg(long)]
    pub only: Option<String>,
    /// Use this fixture file instead of the bundled one.
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Largest prime in the contribution and torsion scans.
    #[arg(long, default_value_t = 29)]
    pub max_p: u64,
    /// Largest N for the double-plane inequality.
    #[arg(long, default_value_t = 10)]
    pub max_n: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct HeightArgs {
    /// Intersection number with the zero section.
    #[arg(long, conflicts_with = "input")]
    pub po: Option<u32>,
    /// Met component as `TYPE:K[:D]`, e.g. `I5:2:4` or `IV*:1`.
    #[arg(long, conflicts_with = "input")]
    pub met: Vec<String>,
    /// Incidence record `{po, met = [{type, n, k, d}]}` as TOML or JSON.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

/// Everything one invocation writes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn error(e: &CliError) -> Output {
        Output { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") }
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                Output { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::VerifyExamples(a) => commands::verify_examples(a),
        Command::Enumerate(a) => commands::enumerate(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Height(a) => commands::height(a),
    };
    result.unwrap_or_else(|e| Output::error(&e))
}

pub(crate) fn read_input(path: &std::path::Path) -> Result<String, CliError> {
    let io = |e: std::io::Error| CliError::Io { path: path.display().to_string(), message: e.to_string() };
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(io)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

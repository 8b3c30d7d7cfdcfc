//! Command-line front end: `fit`, `simulate` and `matrices`.

mod fit;
mod io;
mod matrices;
mod simulate;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::mcmc::{ErrorFamily, KnotPolicy, Variant};

pub use io::{read_observations, read_column, write_dense_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_CHAIN: i32 = 4;

/// A failure carrying its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Chain { .. } | Error::NotPositiveDefinite { .. } | Error::ModeSearch(_) => EXIT_CHAIN,
            Error::TooFewSamples { .. } => EXIT_USAGE,
            _ => EXIT_DEGENERATE,
        };
        Self::new(code, e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "sde-spline", version, about = "Bayesian adaptive smoothing splines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a smoothing spline to `t,y` data.
    Fit(fit::FitArgs),
    /// Run the simulation benchmark.
    Simulate(simulate::SimulateArgs),
    /// Dump a model matrix as dense CSV.
    Matrices(matrices::MatricesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Oss,
    Bass1,
    Bass2,
}

impl From<ModelArg> for Variant {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Oss => Variant::Global,
            ModelArg::Bass1 => Variant::AdaptiveSde1,
            ModelArg::Bass2 => Variant::AdaptiveSde2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorsArg {
    Gaussian,
    Cauchy,
}

impl From<ErrorsArg> for ErrorFamily {
    fn from(e: ErrorsArg) -> Self {
        match e {
            ErrorsArg::Gaussian => ErrorFamily::Gaussian,
            ErrorsArg::Cauchy => ErrorFamily::Cauchy,
        }
    }
}

/// `auto` or a regular knot count.
pub fn parse_knots(s: &str) -> Result<KnotPolicy, String> {
    if s == "auto" {
        return Ok(KnotPolicy::AtData);
    }
    s.parse::<usize>()
        .map(KnotPolicy::Regular)
        .map_err(|_| format!("expected `auto` or a knot count, got `{s}`"))
}

pub(crate) fn output_dir(dir: &Option<PathBuf>) -> CliResult<PathBuf> {
    let dir = dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::usage(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.exit_code() == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let res = match cli.command {
        Command::Fit(a) => fit::run(&a),
        Command::Simulate(a) => simulate::run(&a),
        Command::Matrices(a) => matrices::run(&a),
    };
    match res {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

use std::path::PathBuf;

use clap::{Args, ValueEnum};

use crate::fem::{
    build_b, build_btilde, build_grid, build_h, build_q_global, build_q_sde1, build_q_sde2, build_r, DenseMatrix,
};
use crate::mcmc::default_kappa;

use super::io::{create, read_column, write_dense_csv, write_failed};
use super::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    H,
    B,
    Btilde,
    Q,
    Q1,
    Q2,
    R,
}

#[derive(Debug, Args)]
pub struct MatricesArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    /// Knot locations, one per line.
    #[arg(long)]
    pub grid: PathBuf,
    /// λ at each knot, one per line; required for `q1` and `q2`.
    #[arg(long)]
    pub lambda: Option<PathBuf>,
    /// Range parameter for `r`; defaults to `2 / (t_n - t_1)`.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run(args: &MatricesArgs) -> CliResult<()> {
    if matches!(args.which, Which::Q1 | Which::Q2) && args.lambda.is_none() {
        return Err(CliError::usage("--lambda is required for q1 and q2"));
    }
    if let Some(k) = args.kappa {
        if !(k.is_finite() && k > 0.0) {
            return Err(CliError::usage(format!("--kappa must be positive, got {k}")));
        }
    }
    let knots = read_column(&args.grid)?;
    let lambda = args.lambda.as_ref().map(|p| read_column(p)).transpose()?;
    let grid = build_grid(&knots)?;
    let dense: DenseMatrix<f64> = match args.which {
        Which::H => build_h(&grid).to_dense(),
        Which::B => build_b(&grid).to_dense(),
        Which::Btilde => build_btilde(&grid).to_dense(),
        Which::Q => build_q_global(&grid).to_dense(),
        Which::Q1 => build_q_sde1(&grid, lambda.as_deref().unwrap_or_default())?.to_dense(),
        Which::Q2 => build_q_sde2(&grid, lambda.as_deref().unwrap_or_default())?.to_dense(),
        Which::R => {
            let kappa = args.kappa.unwrap_or_else(|| default_kappa(grid.first(), grid.last()));
            build_r(&grid, kappa)?.to_dense()
        }
    };
    match &args.output {
        Some(path) => write_dense_csv(&dense, create(path)?).map_err(|e| write_failed(path, e)),
        None => write_dense_csv(&dense, std::io::stdout().lock())
            .map_err(|e| CliError::usage(format!("cannot write to stdout: {e}"))),
    }
}

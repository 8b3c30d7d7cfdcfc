use std::path::PathBuf;

use clap::Args;

use crate::bench::{run_benchmark, write_report_csv, write_report_json, BenchConfig, ExampleSpec};
use crate::mcmc::Variant;

use super::io::{create, write_failed};
use super::{output_dir, CliError, CliResult, ModelArg};

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Example ids (1, 2, 3), comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub example: Vec<u8>,
    #[arg(long, default_value_t = crate::bench::DESK_REPS)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "bass1,bass2,oss")]
    pub methods: Vec<ModelArg>,
    #[arg(long, default_value_t = crate::bench::DESK_ITERATIONS)]
    pub iterations: usize,
    #[arg(long, default_value_t = crate::bench::DESK_BURN_IN)]
    pub burnin: usize,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Record wall-clock time per row (otherwise `NA`, keeping output reproducible).
    #[arg(long)]
    pub timing: bool,
    /// Directory receiving `benchmark.csv` and `benchmark.json`.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    for &id in &args.example {
        ExampleSpec::new(id, args.reps, args.seed).map_err(|e| CliError::usage(e.to_string()))?;
    }
    if args.reps < 2 {
        return Err(CliError::usage("--reps must be at least 2"));
    }
    if args.burnin >= args.iterations {
        return Err(CliError::usage("--burnin must be below --iterations"));
    }
    if args.jobs == Some(0) {
        return Err(CliError::usage("--jobs must be positive"));
    }
    let cfg = BenchConfig {
        examples: args.example.clone(),
        methods: args.methods.iter().map(|&m| Variant::from(m)).collect(),
        reps: args.reps,
        seed: args.seed,
        iterations: args.iterations,
        burn_in: args.burnin,
        jobs: args.jobs,
        timing: args.timing,
    };
    let report = run_benchmark(&cfg).map_err(|e| CliError::usage(e.to_string()))?;

    let dir = output_dir(&args.output)?;
    let csv_path = dir.join("benchmark.csv");
    write_report_csv(&report, create(&csv_path)?).map_err(|e| write_failed(&csv_path, e))?;
    let json_path = dir.join("benchmark.json");
    write_report_json(&report, create(&json_path)?).map_err(|e| write_failed(&json_path, e))?;
    Ok(())
}

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use crate::bench::format_float;
use crate::fem::InterpolationMatrix;
use crate::mcmc::{run_model, summarize, Hyperpriors, KnotPolicy, Model, ModelSpec, MIN_SUMMARY_SAMPLES};
use crate::rng::stream;

use super::io::{create, read_observations, write_failed};
use super::{output_dir, parse_knots, CliError, CliResult, ErrorsArg, ModelArg, EXIT_PARSE};

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV file with header `t,y`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    #[arg(long, value_enum)]
    pub errors: Option<ErrorsArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub burnin: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    /// `auto` (one knot per distinct t) or a regular knot count.
    #[arg(long, value_parser = parse_knots)]
    pub knots: Option<KnotPolicy>,
    #[arg(long)]
    pub subknots: Option<usize>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// JSON file with defaults for any of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory receiving `curve.csv` and `summary.json`.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FitConfig {
    model: Option<ModelArg>,
    errors: Option<ErrorsArg>,
    seed: Option<u64>,
    iterations: Option<usize>,
    burnin: Option<usize>,
    thin: Option<usize>,
    knots: Option<KnotsConfig>,
    subknots: Option<usize>,
    kappa: Option<f64>,
    priors: Option<Hyperpriors>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum KnotsConfig {
    Count(usize),
    Named(String),
}

fn load_config(path: &Path) -> CliResult<FitConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

/// Flags override the config file, which overrides the defaults.
fn build_spec(args: &FitArgs) -> CliResult<ModelSpec> {
    let cfg = match &args.config {
        Some(p) => load_config(p)?,
        None => FitConfig::default(),
    };
    let cfg_knots = match cfg.knots {
        None => None,
        Some(KnotsConfig::Count(m)) => Some(KnotPolicy::Regular(m)),
        Some(KnotsConfig::Named(s)) => Some(parse_knots(&s).map_err(CliError::usage)?),
    };
    let d = ModelSpec::default();
    let spec = ModelSpec {
        variant: args.model.or(cfg.model).map_or(d.variant, Into::into),
        errors: args.errors.or(cfg.errors).map_or(d.errors, Into::into),
        priors: cfg.priors.unwrap_or(d.priors),
        kappa: args.kappa.or(cfg.kappa),
        knots: args.knots.or(cfg_knots).unwrap_or(d.knots),
        subknots: args.subknots.or(cfg.subknots),
        iterations: args.iterations.or(cfg.iterations).unwrap_or(d.iterations),
        burn_in: args.burnin.or(cfg.burnin).unwrap_or(d.burn_in),
        thin: args.thin.or(cfg.thin).unwrap_or(d.thin),
        seed: args.seed.or(cfg.seed).unwrap_or(d.seed),
    };
    spec.validate().map_err(|e| CliError::usage(e.to_string()))?;
    if spec.retained() < MIN_SUMMARY_SAMPLES {
        return Err(CliError::usage(format!(
            "only {} draws retained, need at least {MIN_SUMMARY_SAMPLES}",
            spec.retained()
        )));
    }
    Ok(spec)
}

pub fn run(args: &FitArgs) -> CliResult<()> {
    let spec = build_spec(args)?;
    let (t, y) = read_observations(&args.input)?;
    let model = Model::new(&spec, &t, &y)?;
    let draws = run_model(&model, stream(spec.seed, 0))?;
    let n = model.n_knots();
    let summary = summarize(&draws, &InterpolationMatrix::identity(n))?;

    let dir = output_dir(&args.output)?;
    let curve_path = dir.join("curve.csv");
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(create(&curve_path)?);
    let write = |w: &mut csv::Writer<_>| -> csv::Result<()> {
        w.write_record(["t", "mean", "lo95", "hi95", "lambda_mean"])?;
        for (i, knot) in model.grid.knots().iter().enumerate() {
            let f = summary.f[i];
            w.write_record([*knot, f.mean, f.lo95, f.hi95, summary.lambda_mean[i]].map(format_float))?;
        }
        w.flush()?;
        Ok(())
    };
    write(&mut w).map_err(|e| write_failed(&curve_path, e))?;

    let json = serde_json::json!({
        "model": spec.variant.name(),
        "errors": spec.errors,
        "seed": spec.seed,
        "iterations": spec.iterations,
        "burnin": spec.burn_in,
        "thin": spec.thin,
        "knots": n,
        "subknots": model.n_subknots(),
        "kappa": model.kappa,
        "samples": summary.samples,
        "acceptance_gamma": summary.acceptance_gamma,
        "tau": summary.tau,
        "delta": summary.delta,
        "eta": summary.eta,
    });
    let summary_path = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(&json).expect("summary serializes");
    text.push('\n');
    std::fs::write(&summary_path, text).map_err(|e| write_failed(&summary_path, e))?;
    Ok(())
}

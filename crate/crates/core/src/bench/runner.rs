use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mcmc::{quantile_sorted, run_model, Model, ModelSpec, Variant};
use crate::rng::{stream, stream_id};

use super::examples::{gen_dataset, mse, ExampleSpec};

const CHAIN_STREAM: u64 = 0xc4a1;

pub const DESK_REPS: usize = 50;
pub const DESK_ITERATIONS: usize = 5_000;
pub const DESK_BURN_IN: usize = 1_000;

/// Subknot counts for the SDE-II variant, by example.
pub fn sde2_subknots(example: u8) -> usize {
    match example {
        1 => 3,
        2 => 5,
        _ => 10,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub examples: Vec<u8>,
    pub methods: Vec<Variant>,
    pub reps: usize,
    pub seed: u64,
    pub iterations: usize,
    pub burn_in: usize,
    /// Worker threads; `None` uses the available parallelism.
    pub jobs: Option<usize>,
    pub timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            examples: vec![1, 2, 3],
            methods: vec![Variant::AdaptiveSde1, Variant::AdaptiveSde2, Variant::Global],
            reps: DESK_REPS,
            seed: 1,
            iterations: DESK_ITERATIONS,
            burn_in: DESK_BURN_IN,
            jobs: None,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub example: u8,
    pub method: &'static str,
    pub reps: usize,
    pub median_mse: f64,
    pub q1_mse: f64,
    pub q3_mse: f64,
    pub failures: usize,
    pub wall_seconds: Option<f64>,
    /// Per-replication MSE, `None` where the chain failed.
    pub mse: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub seed: u64,
    pub iterations: usize,
    pub burn_in: usize,
    pub rows: Vec<ReportRow>,
}

impl BenchmarkReport {
    pub fn row(&self, example: u8, method: Variant) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.example == example && r.method == method.name())
    }
}

/// Posterior-mean curve MSE for one replication.
pub fn fit_replication(spec: &ExampleSpec, method: Variant, cfg: &BenchConfig, rep: usize) -> Result<f64> {
    let (t, y) = gen_dataset(spec, rep);
    let model_spec = ModelSpec {
        variant: method,
        iterations: cfg.iterations,
        burn_in: cfg.burn_in,
        subknots: (method == Variant::AdaptiveSde2).then(|| sde2_subknots(spec.id)),
        seed: cfg.seed,
        ..ModelSpec::default()
    };
    let model = Model::new(&model_spec, &t, &y)?;
    let rng = stream(cfg.seed, stream_id(&[CHAIN_STREAM, spec.id as u64, method as u64, rep as u64]));
    let draws = run_model(&model, rng)?;
    if draws.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, have: 0 });
    }
    let fhat = model.psi.apply(&draws.mean_w())?;
    mse(&fhat, &spec.truth())
}

struct Outcome {
    mse: Option<f64>,
    seconds: f64,
}

pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchmarkReport> {
    if cfg.reps < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 replications, got {}", cfg.reps)));
    }
    let specs = cfg
        .examples
        .iter()
        .map(|&id| ExampleSpec::new(id, cfg.reps, cfg.seed))
        .collect::<Result<Vec<_>>>()?;
    let tasks: Vec<(usize, usize, usize)> = (0..specs.len())
        .flat_map(|e| (0..cfg.methods.len()).flat_map(move |m| (0..cfg.reps).map(move |r| (e, m, r))))
        .collect();

    let run = || -> Vec<Outcome> {
        tasks
            .par_iter()
            .map(|&(e, m, r)| {
                let start = Instant::now();
                let res = fit_replication(&specs[e], cfg.methods[m], cfg, r);
                if let Err(err) = &res {
                    eprintln!(
                        "warning: example {} {} replication {r} failed: {err}",
                        specs[e].id,
                        cfg.methods[m].name()
                    );
                }
                Outcome { mse: res.ok(), seconds: start.elapsed().as_secs_f64() }
            })
            .collect()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let outcomes = pool.install(run);

    let mut rows = Vec::with_capacity(specs.len() * cfg.methods.len());
    for (chunk, (e, m)) in outcomes
        .chunks(cfg.reps)
        .zip((0..specs.len()).flat_map(|e| (0..cfg.methods.len()).map(move |m| (e, m))))
    {
        let values: Vec<Option<f64>> = chunk.iter().map(|o| o.mse).collect();
        let mut ok: Vec<f64> = values.iter().flatten().copied().collect();
        ok.sort_by(f64::total_cmp);
        let q = |p| if ok.is_empty() { f64::NAN } else { quantile_sorted(&ok, p) };
        let (q1, median, q3) = (q(0.25), q(0.5), q(0.75));
        rows.push(ReportRow {
            example: specs[e].id,
            method: cfg.methods[m].name(),
            reps: cfg.reps,
            median_mse: median,
            q1_mse: q1,
            q3_mse: q3,
            failures: values.len() - ok.len(),
            wall_seconds: cfg.timing.then(|| chunk.iter().map(|o| o.seconds).sum()),
            mse: values,
        });
    }
    Ok(BenchmarkReport { seed: cfg.seed, iterations: cfg.iterations, burn_in: cfg.burn_in, rows })
}

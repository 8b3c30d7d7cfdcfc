use serde::Serialize;

use crate::error::{Error, Result};
use crate::Interpolation64;

use super::chain::Draws;
use super::model::lambda_from_nu;

pub const MIN_SUMMARY_SAMPLES: usize = 100;

/// Posterior mean with a central 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub mean: f64,
    pub lo95: f64,
    pub hi95: f64,
}

impl Interval {
    pub fn from_samples(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self {
            mean: values.iter().sum::<f64>() / values.len() as f64,
            lo95: quantile_sorted(&sorted, 0.025),
            hi95: quantile_sorted(&sorted, 0.975),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi95 - self.lo95
    }
}

/// Linear-interpolation quantile of sorted data (Hyndman–Fan type 7).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSummary {
    /// Pointwise summaries of `f` at the evaluation points.
    pub f: Vec<Interval>,
    /// Posterior mean of `λ(t)` at each knot; ones for the global model.
    pub lambda_mean: Vec<f64>,
    pub tau: Interval,
    pub delta: Interval,
    pub eta: Option<Interval>,
    pub acceptance_gamma: Option<f64>,
    pub samples: usize,
}

pub fn summarize(draws: &Draws, psi_eval: &Interpolation64) -> Result<FitSummary> {
    let s_count = draws.len();
    if s_count < MIN_SUMMARY_SAMPLES {
        return Err(Error::TooFewSamples { needed: MIN_SUMMARY_SAMPLES, have: s_count });
    }
    if psi_eval.ncols() != draws.n {
        return Err(Error::DimensionMismatch { expected: draws.n, got: psi_eval.ncols() });
    }
    let rows = psi_eval.nrows();
    let mut per_point = vec![Vec::with_capacity(s_count); rows];
    for s in 0..s_count {
        let f = psi_eval.apply(draws.w_draw(s))?;
        for (col, v) in per_point.iter_mut().zip(f) {
            col.push(v);
        }
    }
    let f = per_point.iter().map(|v| Interval::from_samples(v)).collect();

    let mut lambda_mean = vec![0.0; draws.n];
    if draws.m > 0 {
        for s in 0..s_count {
            let nu = draws.omega.apply(draws.gamma_draw(s))?;
            for (acc, v) in lambda_mean.iter_mut().zip(nu) {
                *acc += lambda_from_nu(draws.variant, v);
            }
        }
        lambda_mean.iter_mut().for_each(|v| *v /= s_count as f64);
    } else {
        lambda_mean.iter_mut().for_each(|v| *v = 1.0);
    }

    Ok(FitSummary {
        f,
        lambda_mean,
        tau: Interval::from_samples(&draws.tau),
        delta: Interval::from_samples(&draws.delta),
        eta: (!draws.eta.is_empty()).then(|| Interval::from_samples(&draws.eta)),
        acceptance_gamma: draws.acceptance_rate(),
        samples: s_count,
    })
}

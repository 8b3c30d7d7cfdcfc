use std::f64::consts::PI;
use std::sync::OnceLock;

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{stream, stream_id};

/// Stream tag for generated data; chains use a different tag.
pub(crate) const DATA_STREAM: u64 = 0xda7a;

const EX1_KNOTS: [f64; 5] = [0.0, 0.2, 0.6, 0.7, 1.0];
const EX1_COEFFS: [f64; 5] = [20.0, 4.0, 6.0, 11.0, 6.0];
/// Resolution of the grid used to scale the Example-1 basis columns.
const EX1_SCALE_POINTS: usize = 1001;
const DOPPLER_EPS: f64 = 0.125;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExampleSpec {
    pub id: u8,
    pub domain: (f64, f64),
    pub size: usize,
    pub noise_sd: f64,
    pub reps: usize,
    pub seed: u64,
}

impl ExampleSpec {
    /// Defaults for example `id` (1: smooth spline, 2: sharp peak, 3: Doppler).
    pub fn new(id: u8, reps: usize, seed: u64) -> Result<Self> {
        let (domain, size, noise_sd) = match id {
            1 => ((0.0, 1.0), 101, 0.9),
            2 => ((-2.0, 2.0), 101, 0.5),
            3 => ((0.0, 1.0), 201, 0.2),
            _ => return Err(Error::InvalidInput(format!("unknown example {id}, expected 1, 2 or 3"))),
        };
        Ok(Self { id, domain, size, noise_sd, reps, seed })
    }

    pub fn grid(&self) -> Vec<f64> {
        let (lo, hi) = self.domain;
        let step = (hi - lo) / (self.size - 1) as f64;
        (0..self.size)
            .map(|i| if i + 1 == self.size { hi } else { lo + step * i as f64 })
            .collect()
    }

    pub fn truth(&self) -> Vec<f64> {
        self.grid()
            .iter()
            .map(|&t| true_function(self.id, t).expect("grid lies in the domain"))
            .collect()
    }
}

fn cube_plus(x: f64) -> f64 {
    if x > 0.0 {
        x * x * x
    } else {
        0.0
    }
}

/// Unscaled natural cubic spline basis column `k` (0-based, ≥ 2) on the
/// Example-1 knots, in truncated-power form.
fn natural_column(k: usize, x: f64) -> f64 {
    let last = EX1_KNOTS.len() - 1;
    let d = |j: usize| {
        (cube_plus(x - EX1_KNOTS[j]) - cube_plus(x - EX1_KNOTS[last])) / (EX1_KNOTS[last] - EX1_KNOTS[j])
    };
    d(k - 2) - d(last - 1)
}

fn ex1_scales() -> &'static [f64; 5] {
    static SCALES: OnceLock<[f64; 5]> = OnceLock::new();
    SCALES.get_or_init(|| {
        let mut s = [1.0; 5];
        for (k, scale) in s.iter_mut().enumerate().skip(2) {
            *scale = (0..EX1_SCALE_POINTS)
                .map(|i| natural_column(k, i as f64 / (EX1_SCALE_POINTS - 1) as f64).abs())
                .fold(0.0, f64::max);
        }
        s
    })
}

fn example1(t: f64) -> f64 {
    let scales = ex1_scales();
    let mut f = EX1_COEFFS[0] + EX1_COEFFS[1] * t;
    for k in 2..5 {
        f += EX1_COEFFS[k] * natural_column(k, t) / scales[k];
    }
    f
}

pub fn true_function(id: u8, t: f64) -> Result<f64> {
    let spec = ExampleSpec::new(id, 0, 0)?;
    let (lo, hi) = spec.domain;
    if !(lo..=hi).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [{lo}, {hi}] for example {id}")));
    }
    Ok(match id {
        1 => example1(t),
        2 => t.sin() + 2.0 * (-30.0 * t * t).exp(),
        _ => (t * (1.0 - t)).sqrt() * (2.0 * PI * (1.0 + DOPPLER_EPS) / (t + DOPPLER_EPS)).sin(),
    })
}

/// Noisy observations for replication `rep`. The data stream depends only on
/// the master seed, example and replication, so every method sees the same
/// data for a given replication.
pub fn gen_dataset(spec: &ExampleSpec, rep: usize) -> (Vec<f64>, Vec<f64>) {
    let t = spec.grid();
    let mut rng = stream(spec.seed, stream_id(&[DATA_STREAM, spec.id as u64, rep as u64]));
    let y = t
        .iter()
        .map(|&ti| {
            let z: f64 = StandardNormal.sample(&mut rng);
            true_function(spec.id, ti).expect("grid lies in the domain") + spec.noise_sd * z
        })
        .collect();
    (t, y)
}

pub fn mse(fhat: &[f64], ftrue: &[f64]) -> Result<f64> {
    if fhat.len() != ftrue.len() {
        return Err(Error::DimensionMismatch { expected: ftrue.len(), got: fhat.len() });
    }
    if fhat.is_empty() {
        return Err(Error::InvalidInput("mse of empty vectors".into()));
    }
    let sum: f64 = fhat.iter().zip(ftrue).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(sum / fhat.len() as f64)
}

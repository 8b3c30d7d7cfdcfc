use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which prior the spline weights carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Ordinary smoothing spline, one global smoothing parameter.
    Global,
    /// `λ(t) f'' = dW/dt`, precision `H' Λ B̃⁻¹ Λ H`.
    AdaptiveSde1,
    /// `(λ(t) f)'' = dW/dt`, precision `Λ H' B̃⁻¹ H Λ`.
    AdaptiveSde2,
}

impl Variant {
    pub fn is_adaptive(self) -> bool {
        !matches!(self, Variant::Global)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Global => "oss",
            Variant::AdaptiveSde1 => "bass1",
            Variant::AdaptiveSde2 => "bass2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorFamily {
    Gaussian,
    /// Gaussian scale mixture with `ρ_i ~ Gamma(1/2, 1/2)` weights.
    Cauchy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnotPolicy {
    /// One knot per distinct observation location.
    AtData,
    /// `m` evenly spaced knots over the observed range.
    Regular(usize),
}

/// Shape/rate pairs of the Gamma hyperpriors on τ, δ and η.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperpriors {
    pub a_tau: f64,
    pub b_tau: f64,
    pub a_delta: f64,
    pub b_delta: f64,
    pub a_eta: f64,
    pub b_eta: f64,
}

impl Default for Hyperpriors {
    fn default() -> Self {
        let eps = 0.001;
        Self {
            a_tau: eps,
            b_tau: eps,
            a_delta: eps,
            b_delta: eps,
            a_eta: eps,
            b_eta: eps,
        }
    }
}

pub const DEFAULT_ITERATIONS: usize = 10_000;
pub const DEFAULT_BURN_IN: usize = 2_000;
pub const DEFAULT_SDE2_SUBKNOTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub variant: Variant,
    pub errors: ErrorFamily,
    pub priors: Hyperpriors,
    /// Range parameter of the ν prior; `None` uses `2 / (t_n - t_1)`.
    pub kappa: Option<f64>,
    pub knots: KnotPolicy,
    /// Size of the ν basis; `None` uses every knot for SDE-I and
    /// `min(10, n)` for SDE-II.
    pub subknots: Option<usize>,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            variant: Variant::AdaptiveSde1,
            errors: ErrorFamily::Gaussian,
            priors: Hyperpriors::default(),
            kappa: None,
            knots: KnotPolicy::AtData,
            subknots: None,
            iterations: DEFAULT_ITERATIONS,
            burn_in: DEFAULT_BURN_IN,
            thin: 1,
            seed: 0,
        }
    }
}

impl ModelSpec {
    pub fn new(variant: Variant) -> Self {
        Self { variant, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.priors;
        for (name, v) in [
            ("a_tau", p.a_tau),
            ("b_tau", p.b_tau),
            ("a_delta", p.a_delta),
            ("b_delta", p.b_delta),
            ("a_eta", p.a_eta),
            ("b_eta", p.b_eta),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("hyperprior {name} = {v} must be > 0")));
            }
        }
        if let Some(k) = self.kappa {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::Domain(format!("kappa = {k} must be > 0")));
            }
        }
        if self.iterations == 0 || self.thin == 0 {
            return Err(Error::InvalidInput("iterations and thinning must be positive".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::InvalidInput(format!(
                "burn-in {} must be below iterations {}",
                self.burn_in, self.iterations
            )));
        }
        if let KnotPolicy::Regular(m) = self.knots {
            if m < crate::fem::MIN_KNOTS {
                return Err(Error::InvalidInput(format!(
                    "regular knot count {m} below {}",
                    crate::fem::MIN_KNOTS
                )));
            }
        }
        if let Some(m) = self.subknots {
            if m < crate::fem::MIN_SUBKNOTS {
                return Err(Error::InvalidInput(format!("subknot count {m} below 2")));
            }
        }
        Ok(())
    }

    /// Number of retained draws.
    pub fn retained(&self) -> usize {
        (self.iterations - self.burn_in) / self.thin
    }
}

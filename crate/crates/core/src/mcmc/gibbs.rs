//! Conjugate full conditionals: the spline weights, the three precision
//! scales and the scale-mixture weights.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::Result;
use crate::fem::PRECISION_BANDWIDTH;
use crate::linalg::{quad_form, CanonicalGaussian};
use crate::BandedMatrix64;

use super::model::Model;
use super::spec::ErrorFamily;
use super::state::ChainState;

/// Shape/rate parameters of a Gamma full conditional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    pub shape: f64,
    pub rate: f64,
}

impl GammaParams {
    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn variance(&self) -> f64 {
        self.shape / (self.rate * self.rate)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        Gamma::new(self.shape, 1.0 / self.rate)
            .expect("shape and rate are positive")
            .sample(rng)
    }
}

/// `y - Ψ w`
pub fn residuals(model: &Model, w: &[f64]) -> Vec<f64> {
    let fit = model.psi.apply(w).expect("w sized to the grid");
    model.y.iter().zip(fit).map(|(y, f)| y - f).collect()
}

/// `w | rest ~ N(μ, Σ)` with `Σ⁻¹ = τ Ψ' diag(ρ) Ψ + δ Q_λ` and
/// `Σ⁻¹ μ = τ Ψ' diag(ρ) y`.
pub fn w_conditional(model: &Model, state: &ChainState, q_lambda: &BandedMatrix64) -> Result<CanonicalGaussian<f64>> {
    w_system(model, state.tau, state.delta, &state.rho, q_lambda)
}

/// [`w_conditional`] from its ingredients, for trial values of `τ`, `δ`, `ρ`
/// or `Q_λ`.
pub fn w_system(
    model: &Model,
    tau: f64,
    delta: f64,
    rho: &[f64],
    q_lambda: &BandedMatrix64,
) -> Result<CanonicalGaussian<f64>> {
    let weights: Vec<f64> = rho.iter().map(|r| tau * r).collect();
    let mut precision = crate::fem::BandedSymmetricMatrix::zeros(model.n_knots(), PRECISION_BANDWIDTH);
    precision.add_scaled(delta, q_lambda)?;
    model.psi.accumulate_weighted_gram(&weights, &mut precision);
    let wy: Vec<f64> = weights.iter().zip(&model.y).map(|(a, y)| a * y).collect();
    let linear = model.psi.apply_transpose(&wy)?;
    CanonicalGaussian::new(precision, linear)
}

pub fn sample_w<R: Rng + ?Sized>(
    model: &Model,
    state: &ChainState,
    q_lambda: &BandedMatrix64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(w_conditional(model, state, q_lambda)?.factor()?.sample(rng))
}

/// `τ | w, ρ ~ Gamma(N/2 + a_τ, Σ ρ_i ε_i² / 2 + b_τ)`
pub fn tau_conditional(model: &Model, state: &ChainState) -> GammaParams {
    let p = &model.spec.priors;
    let ss: f64 = residuals(model, &state.w)
        .iter()
        .zip(&state.rho)
        .map(|(e, r)| r * e * e)
        .sum();
    GammaParams {
        shape: 0.5 * model.n_obs() as f64 + p.a_tau,
        rate: 0.5 * ss + p.b_tau,
    }
}

pub fn sample_tau<R: Rng + ?Sized>(model: &Model, state: &ChainState, rng: &mut R) -> f64 {
    tau_conditional(model, state).sample(rng)
}

/// `δ | w, λ ~ Gamma((n-2)/2 + a_δ, w' Q_λ w / 2 + b_δ)`
pub fn delta_conditional(model: &Model, state: &ChainState, q_lambda: &BandedMatrix64) -> Result<GammaParams> {
    let p = &model.spec.priors;
    let energy = quad_form(q_lambda, &state.w)?.max(0.0);
    Ok(GammaParams {
        shape: 0.5 * model.n_knots() as f64 - 1.0 + p.a_delta,
        rate: 0.5 * energy + p.b_delta,
    })
}

pub fn sample_delta<R: Rng + ?Sized>(
    model: &Model,
    state: &ChainState,
    q_lambda: &BandedMatrix64,
    rng: &mut R,
) -> Result<f64> {
    Ok(delta_conditional(model, state, q_lambda)?.sample(rng))
}

/// `η | γ ~ Gamma(m/2 + a_η, γ' R γ / 2 + b_η)`
pub fn eta_conditional(model: &Model, state: &ChainState) -> Result<GammaParams> {
    let p = &model.spec.priors;
    let energy = quad_form(&model.r, &state.gamma)?.max(0.0);
    Ok(GammaParams {
        shape: 0.5 * model.n_subknots() as f64 + p.a_eta,
        rate: 0.5 * energy + p.b_eta,
    })
}

pub fn sample_eta<R: Rng + ?Sized>(model: &Model, state: &ChainState, rng: &mut R) -> Result<f64> {
    Ok(eta_conditional(model, state)?.sample(rng))
}

/// `ρ_i | τ, ε_i ~ Gamma(1, 1/2 + τ ε_i² / 2)` under a `Gamma(1/2, 1/2)` prior.
pub fn rho_conditional(tau: f64, residual: f64) -> GammaParams {
    GammaParams {
        shape: 1.0,
        rate: 0.5 + 0.5 * tau * residual * residual,
    }
}

/// Scale-mixture weights; all ones under Gaussian errors.
pub fn sample_rho<R: Rng + ?Sized>(model: &Model, state: &ChainState, rng: &mut R) -> Vec<f64> {
    match model.spec.errors {
        ErrorFamily::Gaussian => vec![1.0; model.n_obs()],
        ErrorFamily::Cauchy => residuals(model, &state.w)
            .into_iter()
            .map(|e| rho_conditional(state.tau, e).sample(rng))
            .collect(),
    }
}

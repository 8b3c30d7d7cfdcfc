//! Metropolis-within-Gibbs inference for the (adaptive) smoothing spline
//! hierarchy, with Gaussian or Cauchy (scale-mixture) errors.

mod chain;
mod gamma;
mod gibbs;
mod model;
mod spec;
mod state;
mod summary;

pub use chain::{run_chain, run_model, Draws, GammaStats, Sampler};
pub use gamma::{
    gamma_taylor_coeffs, second_diffs, second_diffs_with, GammaConditional, ModeSearch,
    SecondDiffs, Sde2GammaConditional, MODE_MAX_ITERATIONS, MODE_TOLERANCE, NU_CLAMP,
};
pub use gibbs::{
    delta_conditional, eta_conditional, residuals, rho_conditional, sample_delta, sample_eta,
    sample_rho, sample_tau, sample_w, tau_conditional, w_conditional, w_system, GammaParams,
};
pub use model::{default_kappa, lambda_from_nu, Model};
pub use spec::{
    ErrorFamily, Hyperpriors, KnotPolicy, ModelSpec, Variant, DEFAULT_BURN_IN, DEFAULT_ITERATIONS,
    DEFAULT_SDE2_SUBKNOTS,
};
pub use state::ChainState;
pub use summary::{quantile_sorted, summarize, FitSummary, Interval, MIN_SUMMARY_SAMPLES};

use crate::error::{Error, Result};
use crate::linalg::{quad_form, FactoredGaussian};
use crate::rng::{stream, Stream};
use crate::{BandedMatrix64, Interpolation64};

use super::gamma::{second_diffs_with, GammaConditional, Sde2GammaConditional};
use super::gibbs;
use super::model::Model;
use super::spec::{ErrorFamily, ModelSpec, Variant};
use super::state::ChainState;

/// Batch length for step-size adaptation of the SDE-II γ sampler.
const ADAPT_BATCH: usize = 50;
const TARGET_SITE_ACCEPTANCE: f64 = 0.44;
const INITIAL_SITE_STEP: f64 = 0.5;

/// Retained post-burn-in draws, row-major (`sample × coordinate`).
#[derive(Debug, Clone, PartialEq)]
pub struct Draws {
    pub variant: Variant,
    pub knots: Vec<f64>,
    /// ν basis at the knots, for mapping `γ` draws to `λ(t)`.
    pub omega: Interpolation64,
    pub n: usize,
    /// Columns of `gamma`; zero when `γ` is not sampled.
    pub m: usize,
    pub w: Vec<f64>,
    pub gamma: Vec<f64>,
    pub tau: Vec<f64>,
    pub delta: Vec<f64>,
    /// Empty when `η` is not sampled.
    pub eta: Vec<f64>,
    pub gamma_attempts: u64,
    pub gamma_accepted: u64,
    /// Sweeps whose γ proposal could not be built.
    pub gamma_failures: u64,
}

impl Draws {
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn w_draw(&self, s: usize) -> &[f64] {
        &self.w[s * self.n..(s + 1) * self.n]
    }

    pub fn gamma_draw(&self, s: usize) -> &[f64] {
        &self.gamma[s * self.m..(s + 1) * self.m]
    }

    pub fn acceptance_rate(&self) -> Option<f64> {
        (self.gamma_attempts > 0).then(|| self.gamma_accepted as f64 / self.gamma_attempts as f64)
    }

    /// Posterior mean of the spline weights.
    pub fn mean_w(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.n];
        for s in 0..self.len() {
            for (m, v) in mean.iter_mut().zip(self.w_draw(s)) {
                *m += v;
            }
        }
        let k = self.len().max(1) as f64;
        mean.iter_mut().for_each(|m| *m /= k);
        mean
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GammaStats {
    pub attempts: u64,
    pub accepted: u64,
    pub failures: u64,
}

/// Redraws allowed when a Gibbs draw leaves the admissible set.
pub const MAX_TRUNCATION_DRAWS: usize = 1000;

/// A single Metropolis-within-Gibbs chain. Sweep order:
/// `w → τ → ρ → γ → δ → η`.
///
/// The chain targets the posterior restricted to states whose `w` full
/// conditional precision factorizes; MH moves leaving that set are rejected
/// and Gibbs draws are redrawn until they land inside it.
#[derive(Debug, Clone)]
pub struct Sampler<'m> {
    model: &'m Model,
    state: ChainState,
    q_lambda: BandedMatrix64,
    w_factor: FactoredGaussian<f64>,
    rng: Stream,
    site_steps: Vec<f64>,
    site_accepts: Vec<u32>,
    stats: GammaStats,
}

impl<'m> Sampler<'m> {
    pub fn new(model: &'m Model, rng: Stream) -> Result<Self> {
        Self::with_state(model, ChainState::initial(model), rng)
    }

    pub fn with_state(model: &'m Model, state: ChainState, rng: Stream) -> Result<Self> {
        let q_lambda = model.precision(&state.nu);
        let w_factor = gibbs::w_conditional(model, &state, &q_lambda)?.factor()?;
        let m = model.n_subknots();
        Ok(Self {
            model,
            state,
            q_lambda,
            w_factor,
            rng,
            site_steps: vec![INITIAL_SITE_STEP; m],
            site_accepts: vec![0; m],
            stats: GammaStats::default(),
        })
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    pub fn q_lambda(&self) -> &BandedMatrix64 {
        &self.q_lambda
    }

    pub fn stats(&self) -> GammaStats {
        self.stats
    }

    pub fn reset_stats(&mut self) {
        self.stats = GammaStats::default();
    }

    fn factor_with(&self, tau: f64, delta: f64, rho: &[f64], q_lambda: &BandedMatrix64) -> Option<FactoredGaussian<f64>> {
        gibbs::w_system(self.model, tau, delta, rho, q_lambda)
            .and_then(|c| c.factor())
            .ok()
    }

    /// Draws from `draw` until the result is admissible.
    fn truncated<T>(
        &mut self,
        mut draw: impl FnMut(&mut Stream) -> T,
        factor: impl Fn(&Self, &T) -> Option<FactoredGaussian<f64>>,
    ) -> Result<(T, FactoredGaussian<f64>)> {
        for _ in 0..MAX_TRUNCATION_DRAWS {
            let v = draw(&mut self.rng);
            if let Some(f) = factor(self, &v) {
                return Ok((v, f));
            }
        }
        Err(Error::NotPositiveDefinite { pivot: self.model.n_knots() - 1 })
    }

    pub fn step_w(&mut self) {
        self.state.w = self.w_factor.sample(&mut self.rng);
    }

    pub fn step_tau(&mut self) -> Result<()> {
        let cond = gibbs::tau_conditional(self.model, &self.state);
        let (tau, f) = self.truncated(
            |rng| cond.sample(rng),
            |s, &tau| s.factor_with(tau, s.state.delta, &s.state.rho, &s.q_lambda),
        )?;
        self.state.tau = tau;
        self.w_factor = f;
        Ok(())
    }

    pub fn step_rho(&mut self) -> Result<()> {
        if self.model.spec.errors != ErrorFamily::Cauchy {
            return Ok(());
        }
        let model = self.model;
        let state = self.state.clone();
        let (rho, f) = self.truncated(
            |rng| gibbs::sample_rho(model, &state, rng),
            |s, rho: &Vec<f64>| s.factor_with(s.state.tau, s.state.delta, rho, &s.q_lambda),
        )?;
        self.state.rho = rho;
        self.w_factor = f;
        Ok(())
    }

    pub fn step_delta(&mut self) -> Result<()> {
        let cond = gibbs::delta_conditional(self.model, &self.state, &self.q_lambda)?;
        let (delta, f) = self.truncated(
            |rng| cond.sample(rng),
            |s, &delta| s.factor_with(s.state.tau, delta, &s.state.rho, &s.q_lambda),
        )?;
        self.state.delta = delta;
        self.w_factor = f;
        Ok(())
    }

    pub fn step_eta(&mut self) -> Result<()> {
        if self.model.variant().is_adaptive() {
            self.state.eta = gibbs::sample_eta(self.model, &self.state, &mut self.rng)?;
        }
        Ok(())
    }

    /// γ update; `adapt` enables step-size tuning of the SDE-II sampler.
    pub fn step_gamma(&mut self, adapt: bool) -> Result<()> {
        match self.model.variant() {
            Variant::Global => Ok(()),
            Variant::AdaptiveSde1 => self.step_gamma_sde1(),
            Variant::AdaptiveSde2 => {
                self.step_gamma_sde2(adapt);
                Ok(())
            }
        }
    }

    fn step_gamma_sde1(&mut self) -> Result<()> {
        let model = self.model;
        let diffs = second_diffs_with(&self.state.w, &model.h, &model.mass)?;
        let cond = GammaConditional {
            s: &diffs.s,
            delta: self.state.delta,
            eta: self.state.eta,
            r: &model.r,
            omega: &model.omega,
        };
        self.stats.attempts += 1;
        match cond.mh_step(&self.state.gamma, &mut self.rng) {
            Ok((gamma, true)) => {
                let nu = model.nu(&gamma);
                let q = model.precision(&nu);
                if let Some(f) = self.factor_with(self.state.tau, self.state.delta, &self.state.rho, &q) {
                    self.stats.accepted += 1;
                    self.state.gamma = gamma;
                    self.state.nu = nu;
                    self.q_lambda = q;
                    self.w_factor = f;
                }
                Ok(())
            }
            Ok((_, false)) => Ok(()),
            Err(Error::ModeSearch(_)) | Err(Error::NotPositiveDefinite { .. }) => {
                self.stats.failures += 1;
                Ok(())
            }
            Err(e) => Err(e),
        }
    }

    fn step_gamma_sde2(&mut self, adapt: bool) {
        let model = self.model;
        let cond = Sde2GammaConditional {
            w: &self.state.w,
            h: &model.h,
            inv_mass: &model.inv_mass,
            delta: self.state.delta,
            eta: self.state.eta,
            r: &model.r,
            omega: &model.omega,
            omega_support: &model.omega_support,
        };
        let (tau, delta, rho) = (self.state.tau, self.state.delta, &self.state.rho);
        let mut gamma = self.state.gamma.clone();
        let mut nu = self.state.nu.clone();
        let mut last_factor = None;
        let accepted = cond.scan(&mut gamma, &mut nu, &self.site_steps, &mut self.rng, |nu| {
            let q = model.precision(nu);
            match gibbs::w_system(model, tau, delta, rho, &q).and_then(|c| c.factor()) {
                Ok(f) => {
                    last_factor = Some((q, f));
                    true
                }
                Err(_) => false,
            }
        });
        self.stats.attempts += accepted.len() as u64;
        for (j, &a) in accepted.iter().enumerate() {
            if a {
                self.stats.accepted += 1;
                if adapt {
                    self.site_accepts[j] += 1;
                }
            }
        }
        if let Some((q, f)) = last_factor {
            self.state.gamma = gamma;
            // recompute rather than trust the incremental ν
            self.state.nu = model.nu(&self.state.gamma);
            self.q_lambda = q;
            self.w_factor = f;
        }
    }

    fn adapt_site_steps(&mut self, batch: usize) {
        let gain = (1.0 / (batch as f64).sqrt()).min(0.5);
        for (step, acc) in self.site_steps.iter_mut().zip(self.site_accepts.iter_mut()) {
            let rate = *acc as f64 / ADAPT_BATCH as f64;
            let dir = if rate > TARGET_SITE_ACCEPTANCE { 1.0 } else { -1.0 };
            *step *= (dir * gain).exp();
            *acc = 0;
        }
    }

    /// One full sweep. `sweep` counts from zero; adaptation runs only
    /// during burn-in.
    pub fn sweep(&mut self, sweep: usize, burn_in: usize) -> Result<()> {
        let wrap = |e: Error| Error::Chain { sweep, source: Box::new(e) };
        self.step_w();
        self.step_tau().map_err(wrap)?;
        self.step_rho().map_err(wrap)?;
        let adapt = sweep < burn_in;
        self.step_gamma(adapt).map_err(wrap)?;
        if adapt && (sweep + 1).is_multiple_of(ADAPT_BATCH) {
            self.adapt_site_steps((sweep + 1) / ADAPT_BATCH);
        }
        self.step_delta().map_err(wrap)?;
        self.step_eta().map_err(wrap)?;
        Ok(())
    }

    pub fn energy(&self) -> f64 {
        quad_form(&self.q_lambda, &self.state.w).expect("w sized to the grid")
    }
}

/// Runs a chain for `model` with the chain seed from its spec.
pub fn run_model(model: &Model, rng: Stream) -> Result<Draws> {
    let spec = &model.spec;
    let n = model.n_knots();
    let samples_gamma = model.variant().is_adaptive();
    let m = if samples_gamma { model.n_subknots() } else { 0 };
    let keep = spec.retained();
    let mut draws = Draws {
        variant: model.variant(),
        knots: model.grid.knots().to_vec(),
        omega: model.omega.clone(),
        n,
        m,
        w: Vec::with_capacity(keep * n),
        gamma: Vec::with_capacity(keep * m),
        tau: Vec::with_capacity(keep),
        delta: Vec::with_capacity(keep),
        eta: Vec::with_capacity(if samples_gamma { keep } else { 0 }),
        gamma_attempts: 0,
        gamma_accepted: 0,
        gamma_failures: 0,
    };
    let mut sampler = Sampler::new(model, rng)?;
    for it in 0..spec.iterations {
        if it == spec.burn_in {
            sampler.reset_stats();
        }
        sampler.sweep(it, spec.burn_in)?;
        if it >= spec.burn_in && (it - spec.burn_in + 1).is_multiple_of(spec.thin) {
            let st = sampler.state();
            draws.w.extend_from_slice(&st.w);
            draws.tau.push(st.tau);
            draws.delta.push(st.delta);
            if samples_gamma {
                draws.gamma.extend_from_slice(&st.gamma);
                draws.eta.push(st.eta);
            }
        }
    }
    let stats = sampler.stats();
    draws.gamma_attempts = stats.attempts;
    draws.gamma_accepted = stats.accepted;
    draws.gamma_failures = stats.failures;
    Ok(draws)
}

/// Fits `spec` to observations `(t, y)`; deterministic in `spec.seed`.
pub fn run_chain(spec: &ModelSpec, t: &[f64], y: &[f64]) -> Result<Draws> {
    let model = Model::new(spec, t, y)?;
    run_model(&model, stream(spec.seed, 0))
}

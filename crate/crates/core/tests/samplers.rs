mod common;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use sde_spline::fem::{build_h, build_interpolation, build_r, BandedSymmetricMatrix, Grid};
use sde_spline::linalg::CanonicalGaussian;
use sde_spline::mcmc::{
    sample_delta, sample_eta, sample_rho, sample_tau, ChainState, ErrorFamily, GammaConditional, Model, ModelSpec,
    Sampler, Sde2GammaConditional, Variant,
};
use sde_spline::rng::stream;
use sde_spline::{Grid64, Interpolation64};

fn data(n: usize) -> (Vec<f64>, Vec<f64>) {
    // irregular locations with a repeated one
    let mut t: Vec<f64> = (0..n).map(|i| (i as f64 / (n - 1) as f64).powf(1.4) * 3.0).collect();
    t.push(t[n / 2]);
    let y = t.iter().map(|v| (2.0 * v).sin() + 0.3 * (7.0 * v).cos()).collect();
    (t, y)
}

fn state_for(model: &Model, seed: u64) -> ChainState {
    let mut rng = stream(seed, 3);
    let mut s = ChainState::initial(model);
    s.w = s.w.iter().map(|w| w + rng.random_range(-0.2..0.2)).collect();
    s.tau = 3.0;
    s.delta = 0.7;
    s.eta = 2.5;
    s.rho = (0..model.n_obs()).map(|_| rng.random_range(0.3..2.0)).collect();
    let gamma = (0..model.n_subknots()).map(|_| rng.random_range(-1.0..1.0)).collect();
    s.set_gamma(model, gamma);
    s
}

fn dense_psi(t: &[f64], knots: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(t.len(), knots.len(), |r, c| common::hat(knots, c, t[r]))
}

fn oracle_lambda(variant: Variant, nu: &[f64]) -> Vec<f64> {
    match variant {
        Variant::AdaptiveSde1 => nu.iter().map(|v| (0.5 * v).exp()).collect(),
        Variant::AdaptiveSde2 => nu.iter().map(|v| v.exp()).collect(),
        Variant::Global => vec![1.0; nu.len()],
    }
}

fn oracle_q(variant: Variant, knots: &[f64], nu: &[f64]) -> DMatrix<f64> {
    let lambda = oracle_lambda(variant, nu);
    match variant {
        Variant::AdaptiveSde2 => common::q_sde2(knots, &lambda),
        _ => common::q_sde1(knots, &lambda),
    }
}

fn check_mean(name: &str, draws: &[f64], expected: f64) {
    let got = common::mean(draws);
    assert!(
        (got - expected).abs() <= 0.01 * expected,
        "{name}: empirical mean {got}, expected {expected}"
    );
}

const MOMENT_DRAWS: usize = 100_000;

#[test]
fn gamma_full_conditionals_match_closed_forms() {
    let (t, y) = data(12);
    for variant in [Variant::AdaptiveSde1, Variant::AdaptiveSde2] {
        let spec = ModelSpec { variant, errors: ErrorFamily::Cauchy, ..ModelSpec::default() };
        let model = Model::new(&spec, &t, &y).unwrap();
        let state = state_for(&model, 1);
        let knots = model.grid.knots().to_vec();
        let p = spec.priors;
        let w = DVector::from_column_slice(&state.w);
        let resid = DVector::from_column_slice(&y) - dense_psi(&t, &knots) * &w;

        let ss: f64 = resid.iter().zip(&state.rho).map(|(e, r)| r * e * e).sum();
        let tau_mean = (t.len() as f64 / 2.0 + p.a_tau) / (ss / 2.0 + p.b_tau);
        let q = oracle_q(variant, &knots, &state.nu);
        let energy = (w.transpose() * &q * &w)[0];
        let delta_mean = ((knots.len() as f64 - 2.0) / 2.0 + p.a_delta) / (energy / 2.0 + p.b_delta);
        let g = DVector::from_column_slice(&state.gamma);
        let r = common::r(model.subgrid.knots(), model.kappa);
        let eta_mean = (state.gamma.len() as f64 / 2.0 + p.a_eta) / ((g.transpose() * r * &g)[0] / 2.0 + p.b_eta);
        let rho0_mean = 1.0 / (0.5 + 0.5 * state.tau * resid[0] * resid[0]);

        let q_lambda = model.precision(&state.nu);
        let mut rng = stream(7, variant as u64);
        let taus: Vec<f64> = (0..MOMENT_DRAWS).map(|_| sample_tau(&model, &state, &mut rng)).collect();
        let deltas: Vec<f64> =
            (0..MOMENT_DRAWS).map(|_| sample_delta(&model, &state, &q_lambda, &mut rng).unwrap()).collect();
        let etas: Vec<f64> = (0..MOMENT_DRAWS).map(|_| sample_eta(&model, &state, &mut rng).unwrap()).collect();
        let rhos: Vec<f64> = (0..MOMENT_DRAWS).map(|_| sample_rho(&model, &state, &mut rng)[0]).collect();
        check_mean("tau", &taus, tau_mean);
        check_mean("delta", &deltas, delta_mean);
        check_mean("eta", &etas, eta_mean);
        check_mean("rho", &rhos, rho0_mean);
    }
}

#[test]
fn frozen_hyperparameter_w_mean_matches_direct_solve() {
    let (t, y) = data(19);
    let spec = ModelSpec { variant: Variant::AdaptiveSde1, ..ModelSpec::default() };
    let model = Model::new(&spec, &t, &y).unwrap();
    assert_eq!(model.n_knots(), 19);
    let mut state = state_for(&model, 2);
    state.rho = vec![1.0; model.n_obs()];
    let knots = model.grid.knots().to_vec();
    let psi = dense_psi(&t, &knots);
    let precision = psi.transpose() * &psi * state.tau + oracle_q(Variant::AdaptiveSde1, &knots, &state.nu) * state.delta;
    let lin = psi.transpose() * DVector::from_column_slice(&y) * state.tau;
    let cov = precision.clone().try_inverse().unwrap();
    let mu = &cov * lin;

    let sweeps = 10_000;
    let mut sampler = Sampler::with_state(&model, state, stream(3, 0)).unwrap();
    let mut sum = vec![0.0; knots.len()];
    for _ in 0..sweeps {
        sampler.step_w();
        for (s, w) in sum.iter_mut().zip(&sampler.state().w) {
            *s += w;
        }
    }
    for i in 0..knots.len() {
        let se = (cov[(i, i)] / sweeps as f64).sqrt();
        let z = (sum[i] / sweeps as f64 - mu[i]) / se;
        assert!(z.abs() <= 3.0, "coordinate {i}: z = {z}");
    }
}

struct Sde1Setup {
    s: Vec<f64>,
    r: BandedSymmetricMatrix<f64>,
    omega: Interpolation64,
    subgrid: Grid64,
}

/// Four knots on [0, 3], a three-point ν basis.
fn small_sde1(s: Vec<f64>, kappa: f64) -> Sde1Setup {
    let grid = Grid::regular(0.0, 3.0, 4).unwrap();
    let subgrid = Grid::with_min_len(&[0.0, 1.5, 3.0], 2).unwrap();
    let omega = build_interpolation(grid.knots(), &subgrid).unwrap();
    let r = build_r(&subgrid, kappa).unwrap();
    Sde1Setup { s, r, omega, subgrid }
}

#[test]
fn degenerate_target_is_accepted_with_probability_one() {
    let set = small_sde1(vec![0.0; 4], 0.8);
    let cond = GammaConditional { s: &set.s, delta: 1.3, eta: 0.9, r: &set.r, omega: &set.omega };
    let mut rng = stream(12, 0);
    for _ in 0..200 {
        let current: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
        let proposal = cond.proposal(&current).unwrap();
        let proposed = proposal.sample(&mut rng);
        let log_alpha = cond.log_acceptance_ratio(&proposal, &current, &proposed).unwrap();
        assert!(log_alpha.abs() <= 1e-10, "log acceptance {log_alpha}");
    }
}

#[test]
fn mode_matches_coordinate_search() {
    let mut rng = stream(13, 0);
    for _ in 0..10 {
        let s: Vec<f64> = (0..4).map(|i| if i == 0 || i == 3 { 0.0 } else { rng.random_range(0.05..3.0) }).collect();
        let set = small_sde1(s, rng.random_range(0.3..2.0));
        let cond = GammaConditional { s: &set.s, delta: rng.random_range(0.2..3.0), eta: rng.random_range(0.2..3.0), r: &set.r, omega: &set.omega };
        let search = cond.find_mode(&[0.0; 3]).unwrap();
        assert!(search.converged);
        let oracle = common::coordinate_maximize(|g| cond.log_target(g), &[0.0; 3], -20.0, 20.0, 200);
        for (a, b) in search.mode.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-5, "mode {:?} vs oracle {:?}", search.mode, oracle);
        }
    }
}

/// Mean and variance of each coordinate of `exp(log_f)` on a box, by the
/// rectangle rule.
fn quadrature_moments(log_f: impl Fn(&[f64]) -> f64, half_width: f64, points: usize) -> (Vec<f64>, Vec<f64>) {
    let step = 2.0 * half_width / (points - 1) as f64;
    let axis: Vec<f64> = (0..points).map(|i| -half_width + step * i as f64).collect();
    let mut peak = f64::NEG_INFINITY;
    let mut vals = Vec::with_capacity(points.pow(3));
    for &a in &axis {
        for &b in &axis {
            for &c in &axis {
                let v = log_f(&[a, b, c]);
                peak = peak.max(v);
                vals.push(([a, b, c], v));
            }
        }
    }
    let (mut z, mut m1, mut m2) = (0.0, [0.0; 3], [0.0; 3]);
    for (x, v) in vals {
        let w = (v - peak).exp();
        z += w;
        for k in 0..3 {
            m1[k] += w * x[k];
            m2[k] += w * x[k] * x[k];
        }
    }
    let mean: Vec<f64> = m1.iter().map(|m| m / z).collect();
    let var = (0..3).map(|k| m2[k] / z - mean[k] * mean[k]).collect();
    (mean, var)
}

/// Batch-means standard error.
fn batch_se(xs: &[f64]) -> f64 {
    let batches = 50;
    let len = xs.len() / batches;
    let means: Vec<f64> = xs.chunks(len).take(batches).map(common::mean).collect();
    (common::variance(&means) / batches as f64).sqrt()
}

fn assert_chain_matches(chain: &[Vec<f64>], mean: &[f64], var: &[f64]) {
    for k in 0..3 {
        let xs: Vec<f64> = chain.iter().map(|g| g[k]).collect();
        let z = (common::mean(&xs) - mean[k]) / batch_se(&xs);
        assert!(z.abs() < 4.0, "coordinate {k}: chain mean {} vs {} (z = {z})", common::mean(&xs), mean[k]);
        let v = common::variance(&xs);
        assert!((v - var[k]).abs() < 0.1 * var[k], "coordinate {k}: chain var {v} vs {}", var[k]);
    }
}

#[test]
fn independence_sampler_targets_the_full_conditional() {
    let set = small_sde1(vec![0.0, 2.0, 0.3, 0.0], 1.0);
    let cond = GammaConditional { s: &set.s, delta: 1.0, eta: 0.5, r: &set.r, omega: &set.omega };
    let (mean, var) = quadrature_moments(|g| cond.log_target(g), 12.0, 121);
    let mut rng = stream(17, 0);
    let mut gamma = vec![0.0; 3];
    let mut chain = Vec::new();
    for _ in 0..40_000 {
        gamma = cond.mh_step(&gamma, &mut rng).unwrap().0;
        chain.push(gamma.clone());
    }
    assert_chain_matches(&chain, &mean, &var);
    assert_eq!(set.subgrid.len(), 3);
}

#[test]
fn single_site_sampler_targets_the_sde2_conditional() {
    let grid = Grid::regular(0.0, 3.0, 4).unwrap();
    let subgrid = Grid::with_min_len(&[0.0, 1.5, 3.0], 2).unwrap();
    let omega = build_interpolation(grid.knots(), &subgrid).unwrap();
    let support = vec![(0, 1), (1, 2), (2, 3)];
    let r = build_r(&subgrid, 1.0).unwrap();
    let h = build_h(&grid);
    let inv_mass: Vec<f64> = sde_spline::fem::build_btilde(&grid).diag().iter().map(|m| 1.0 / m).collect();
    let w = vec![0.3, -0.5, 0.8, 0.1];
    let cond = Sde2GammaConditional {
        w: &w,
        h: &h,
        inv_mass: &inv_mass,
        delta: 1.0,
        eta: 0.5,
        r: &r,
        omega: &omega,
        omega_support: &support,
    };
    let (mean, var) = quadrature_moments(|g| cond.log_target(g), 12.0, 121);
    let mut rng = stream(19, 0);
    let mut gamma = vec![0.0; 3];
    let mut nu = vec![0.0; 4];
    let mut chain = Vec::new();
    for _ in 0..100_000 {
        cond.scan(&mut gamma, &mut nu, &[1.2; 3], &mut rng, |_| true);
        chain.push(gamma.clone());
    }
    assert_chain_matches(&chain, &mean, &var);
}

#[test]
fn canonical_helpers_agree_with_gibbs_w_step() {
    // the sampler's w step is a draw from w_conditional
    let (t, y) = data(10);
    let model = Model::new(&ModelSpec::new(Variant::Global), &t, &y).unwrap();
    let state = state_for(&model, 4);
    let q = model.precision(&state.nu);
    let cond: CanonicalGaussian<f64> = sde_spline::mcmc::w_conditional(&model, &state, &q).unwrap();
    let mut a = Sampler::with_state(&model, state, stream(1, 1)).unwrap();
    a.step_w();
    let direct = cond.factor().unwrap().sample(&mut stream(1, 1));
    assert_eq!(a.state().w, direct);
}

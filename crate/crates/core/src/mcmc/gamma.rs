//! Updates of the log-smoothing weights `γ`.
//!
//! Under SDE-I the spline prior factorizes over second differences:
//! `[w | δ, ν] ∝ Π_i (δ e^{ν_i})^{1/2} exp(-δ e^{ν_i} s_i / 2)` over interior
//! knots, with `s_i = (H w)_i² / B̃_ii`. A second-order expansion of each
//! factor in `ν_i` turns the full conditional of `γ` into a GMRF, which is
//! used as an independence proposal built at the conditional mode.
//!
//! SDE-II has no such factorization; its `γ` is updated by single-site
//! random-walk Metropolis.

use rand::Rng;

use crate::error::{Error, Result};
use crate::fem::{BandedSymmetricMatrix, PRECISION_BANDWIDTH};
use crate::linalg::{quad_form, CanonicalGaussian, FactoredGaussian};
use crate::{BandedMatrix64, Grid64, Interpolation64, TriDiag64};

/// `ν` is clamped to this range before exponentiation when building
/// proposals. Targets are always evaluated unclamped.
pub const NU_CLAMP: f64 = 30.0;
pub const MODE_TOLERANCE: f64 = 1e-6;
pub const MODE_MAX_ITERATIONS: usize = 50;
const MAX_STEP_HALVINGS: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct SecondDiffs {
    /// `H w`; first and last entries are zero.
    pub wtilde: Vec<f64>,
    /// `w̃_i² / B̃_ii`
    pub s: Vec<f64>,
}

pub fn second_diffs(w: &[f64], grid: &Grid64) -> Result<SecondDiffs> {
    let h = crate::fem::build_h(grid);
    let mass = crate::fem::build_btilde(grid);
    second_diffs_with(w, &h, mass.diag())
}

pub fn second_diffs_with(w: &[f64], h: &TriDiag64, mass: &[f64]) -> Result<SecondDiffs> {
    let wtilde = h.mul_vec(w)?;
    let s = wtilde.iter().zip(mass).map(|(v, m)| v * v / m).collect();
    Ok(SecondDiffs { wtilde, s })
}

/// Coefficients of `b ν - c ν² / 2` matching `ν/2 - δ e^ν s / 2` to second
/// order at `ν₀`, per interior knot; zero at the two boundary knots.
pub fn gamma_taylor_coeffs(nu0: &[f64], s: &[f64], delta: f64) -> (Vec<f64>, Vec<f64>) {
    let n = nu0.len();
    let mut b = vec![0.0; n];
    let mut c = vec![0.0; n];
    for i in 1..n.saturating_sub(1) {
        let v = nu0[i].clamp(-NU_CLAMP, NU_CLAMP);
        let curv = 0.5 * delta * v.exp() * s[i];
        c[i] = curv;
        b[i] = 0.5 - curv * (1.0 - v);
    }
    (b, c)
}

/// Outcome of the Newton–Raphson mode search.
#[derive(Debug, Clone)]
pub struct ModeSearch {
    pub mode: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Log target at every iterate, starting point first.
    pub trace: Vec<f64>,
}

/// Full conditional of `γ` given `w`, `δ` and `η` under SDE-I.
#[derive(Debug, Clone, Copy)]
pub struct GammaConditional<'a> {
    pub s: &'a [f64],
    pub delta: f64,
    pub eta: f64,
    pub r: &'a BandedMatrix64,
    pub omega: &'a Interpolation64,
}

impl GammaConditional<'_> {
    /// `Σ_{interior i} (ν_i/2 - δ e^{ν_i} s_i / 2) - (η/2) γ' R γ` with
    /// `ν = Ω γ`; `-∞` on overflow.
    pub fn log_target(&self, gamma: &[f64]) -> f64 {
        let nu = self.omega.apply(gamma).expect("gamma sized to Omega");
        let n = nu.len();
        let mut acc = 0.0;
        for i in 1..n.saturating_sub(1) {
            acc += 0.5 * nu[i] - 0.5 * self.delta * nu[i].exp() * self.s[i];
        }
        acc -= 0.5 * self.eta * quad_form(self.r, gamma).expect("gamma sized to R");
        if acc.is_nan() {
            f64::NEG_INFINITY
        } else {
            acc
        }
    }

    /// Gaussian approximation `N(P⁻¹ Ω'b, P⁻¹)`, `P = ηR + Ω' diag(c) Ω`,
    /// from the expansion at `gamma0`.
    pub fn approximation(&self, gamma0: &[f64]) -> Result<CanonicalGaussian<f64>> {
        let nu0 = self.omega.apply(gamma0)?;
        let (b, c) = gamma_taylor_coeffs(&nu0, self.s, self.delta);
        let mut p = BandedSymmetricMatrix::zeros(self.r.dim(), PRECISION_BANDWIDTH);
        p.add_scaled(self.eta, self.r)?;
        self.omega.accumulate_weighted_gram(&c, &mut p);
        let lin = self.omega.apply_transpose(&b)?;
        CanonicalGaussian::new(p, lin)
    }

    /// Damped Newton–Raphson from `start`: each step moves to the mean of the
    /// local approximation, halving while the log target decreases.
    pub fn find_mode(&self, start: &[f64]) -> Result<ModeSearch> {
        let mut gamma = start.to_vec();
        let mut f = self.log_target(&gamma);
        let mut trace = vec![f];
        for it in 1..=MODE_MAX_ITERATIONS {
            let next = self
                .approximation(&gamma)?
                .factor()
                .map_err(|e| Error::ModeSearch(format!("proposal precision: {e}")))?
                .mean;
            let step: Vec<f64> = next.iter().zip(&gamma).map(|(a, b)| a - b).collect();
            let mut scale = 1.0;
            let mut cand = next;
            let mut f_cand = self.log_target(&cand);
            let mut halvings = 0;
            while !(f_cand >= f) && halvings < MAX_STEP_HALVINGS {
                scale *= 0.5;
                halvings += 1;
                cand = gamma.iter().zip(&step).map(|(g, d)| g + scale * d).collect();
                f_cand = self.log_target(&cand);
            }
            if !(f_cand >= f) {
                // no ascent direction left within roundoff
                trace.push(f);
                return Ok(ModeSearch { mode: gamma, iterations: it, converged: true, trace });
            }
            let change = step.iter().fold(0.0f64, |m, d| m.max((scale * d).abs()));
            gamma = cand;
            f = f_cand;
            trace.push(f);
            if change < MODE_TOLERANCE {
                return Ok(ModeSearch { mode: gamma, iterations: it, converged: true, trace });
            }
        }
        Ok(ModeSearch {
            mode: gamma,
            iterations: MODE_MAX_ITERATIONS,
            converged: false,
            trace,
        })
    }

    /// Proposal for the independence sampler, expanded at the mode found
    /// from `start`.
    pub fn proposal(&self, start: &[f64]) -> Result<FactoredGaussian<f64>> {
        let search = self.find_mode(start)?;
        if !search.converged {
            return Err(Error::ModeSearch(format!(
                "no convergence in {MODE_MAX_ITERATIONS} iterations"
            )));
        }
        self.approximation(&search.mode)?.factor()
    }

    /// `log [F(γ*) q(γ)] - log [F(γ) q(γ*)]`
    pub fn log_acceptance_ratio(
        &self,
        proposal: &FactoredGaussian<f64>,
        current: &[f64],
        proposed: &[f64],
    ) -> Result<f64> {
        let f_prop = self.log_target(proposed);
        if f_prop == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        let f_cur = self.log_target(current);
        let q_cur = proposal.log_density_unnormalized(current)?;
        let q_prop = proposal.log_density_unnormalized(proposed)?;
        Ok((f_prop - f_cur) - (q_prop - q_cur))
    }

    /// One independence Metropolis–Hastings step. Returns the new `γ` and
    /// whether the proposal was accepted.
    pub fn mh_step<R: Rng + ?Sized>(&self, current: &[f64], rng: &mut R) -> Result<(Vec<f64>, bool)> {
        let proposal = self.proposal(current)?;
        let proposed = proposal.sample(rng);
        let log_alpha = self.log_acceptance_ratio(&proposal, current, &proposed)?;
        let u: f64 = rng.random();
        if u.ln() < log_alpha {
            Ok((proposed, true))
        } else {
            Ok((current.to_vec(), false))
        }
    }
}

/// Full conditional of `γ` under SDE-II:
/// `Σ_i ν_i - (δ/2) Σ_k (H Λ w)_k² / B̃_kk - (η/2) γ' R γ`, `λ = e^ν`.
#[derive(Debug, Clone, Copy)]
pub struct Sde2GammaConditional<'a> {
    pub w: &'a [f64],
    pub h: &'a TriDiag64,
    pub inv_mass: &'a [f64],
    pub delta: f64,
    pub eta: f64,
    pub r: &'a BandedMatrix64,
    pub omega: &'a Interpolation64,
    pub omega_support: &'a [(usize, usize)],
}

impl Sde2GammaConditional<'_> {
    pub fn log_target(&self, gamma: &[f64]) -> f64 {
        let nu = self.omega.apply(gamma).expect("gamma sized to Omega");
        let n = nu.len();
        let energy = self.energy_range(&nu, 1, n.saturating_sub(2));
        let v = nu.iter().sum::<f64>() - 0.5 * self.delta * energy
            - 0.5 * self.eta * quad_form(self.r, gamma).expect("gamma sized to R");
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    }

    /// `Σ_{k=lo..=hi} (H Λ w)_k² / B̃_kk` over interior rows.
    fn energy_range(&self, nu: &[f64], lo: usize, hi: usize) -> f64 {
        let n = nu.len();
        let lw = |i: usize| nu[i].exp() * self.w[i];
        let mut e = 0.0;
        for k in lo.max(1)..=hi.min(n - 2) {
            let v = self.h.sub[k - 1] * lw(k - 1) + self.h.main[k] * lw(k) + self.h.sup[k] * lw(k + 1);
            e += v * v * self.inv_mass[k];
        }
        e
    }

    /// Change in log target when `γ_j` moves by `step`, evaluated locally.
    pub fn delta_log_target(&self, gamma: &[f64], nu: &[f64], j: usize, step: f64) -> f64 {
        let (lo, hi) = self.omega_support[j];
        let mut patched = nu.to_vec();
        let mut dnu_sum = 0.0;
        for (i, v) in patched.iter_mut().enumerate().take(hi + 1).skip(lo) {
            for (c, wgt) in self.omega.row_entries(i) {
                if c == j {
                    *v += wgt * step;
                    dnu_sum += wgt * step;
                }
            }
        }
        let e_lo = lo.saturating_sub(1);
        let e_hi = hi + 1;
        let de = self.energy_range(&patched, e_lo, e_hi) - self.energy_range(nu, e_lo, e_hi);
        // γ'Rγ changes by 2 step (Rγ)_j + R_jj step²
        let p = self.r.bandwidth();
        let m = gamma.len();
        let mut rg = 0.0;
        for k in j.saturating_sub(p)..=(j + p).min(m - 1) {
            rg += self.r.get(j, k) * gamma[k];
        }
        let dq = 2.0 * step * rg + self.r.get(j, j) * step * step;
        let d = dnu_sum - 0.5 * self.delta * de - 0.5 * self.eta * dq;
        if d.is_nan() {
            f64::NEG_INFINITY
        } else {
            d
        }
    }

    /// One systematic scan of single-site random-walk Metropolis updates
    /// with per-site step sizes. Updates `gamma` and `nu` in place and
    /// returns the accepted flags. Moves to a `ν` rejected by `admissible`
    /// are rejected, which restricts the target to the admissible set.
    pub fn scan<R: Rng + ?Sized>(
        &self,
        gamma: &mut [f64],
        nu: &mut [f64],
        steps: &[f64],
        rng: &mut R,
        mut admissible: impl FnMut(&[f64]) -> bool,
    ) -> Vec<bool> {
        let mut accepted = vec![false; gamma.len()];
        for j in 0..gamma.len() {
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            let step = steps[j] * z;
            let d = self.delta_log_target(gamma, nu, j, step);
            let u: f64 = rng.random();
            if u.ln() < d {
                let (lo, hi) = self.omega_support[j];
                let saved = nu[lo..=hi].to_vec();
                for i in lo..=hi {
                    for (c, w) in self.omega.row_entries(i) {
                        if c == j {
                            nu[i] += w * step;
                        }
                    }
                }
                if admissible(nu) {
                    gamma[j] += step;
                    accepted[j] = true;
                } else {
                    nu[lo..=hi].copy_from_slice(&saved);
                }
            }
        }
        accepted
    }
}

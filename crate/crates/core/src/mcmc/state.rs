use crate::linalg::quad_form;

use super::model::Model;

/// Current values of every unknown in the hierarchy.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    /// Spline weights at the knots.
    pub w: Vec<f64>,
    /// ν-basis weights; `ν = Ω γ`.
    pub gamma: Vec<f64>,
    /// Error precision.
    pub tau: f64,
    /// Spline precision scale.
    pub delta: f64,
    /// ν-prior precision scale.
    pub eta: f64,
    /// Scale-mixture weights, one per observation; all 1 for Gaussian errors.
    pub rho: Vec<f64>,
    /// Cached `Ω γ`.
    pub nu: Vec<f64>,
}

impl ChainState {
    /// Starting point: `w` from the data, `γ = 0`, `τ` from a first-difference
    /// noise estimate, `δ` matched to the roughness of the starting `w`,
    /// `η = 1`, `ρ = 1`.
    pub fn initial(model: &Model) -> Self {
        let n = model.n_knots();
        let m = model.n_subknots();
        let w = initial_weights(model);
        let delta = match quad_form(&model.q_global, &w) {
            Ok(e) if e > 0.0 && e.is_finite() => (n as f64 - 2.0) / e,
            _ => 1.0,
        };
        Self {
            w,
            gamma: vec![0.0; m],
            tau: initial_tau(&model.t, &model.y),
            delta,
            eta: 1.0,
            rho: vec![1.0; model.y.len()],
            nu: vec![0.0; n],
        }
    }

    pub fn set_gamma(&mut self, model: &Model, gamma: Vec<f64>) {
        self.nu = model.nu(&gamma);
        self.gamma = gamma;
    }
}

/// `1/σ̂²` with `σ̂² = Σ (y_{i+1} − y_i)² / (2(N − 1))` over the data sorted by
/// `t`, falling back to the sample variance and then to 1.
fn initial_tau(t: &[f64], y: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.sort_by(|&a, &b| t[a].total_cmp(&t[b]).then(y[a].total_cmp(&y[b])));
    let k = y.len() as f64;
    let diff: f64 = order.windows(2).map(|p| (y[p[1]] - y[p[0]]).powi(2)).sum::<f64>() / (2.0 * (k - 1.0));
    let mean = y.iter().sum::<f64>() / k;
    let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
    [diff, var]
        .into_iter()
        .find(|v| *v > 0.0 && v.is_finite())
        .map_or(1.0, |v| 1.0 / v)
}

/// Per-knot data means when every knot carries data, otherwise the
/// least-squares line through the data evaluated at the knots.
fn initial_weights(model: &Model) -> Vec<f64> {
    let n = model.n_knots();
    let mut sums = vec![0.0; n];
    let mut counts = vec![0usize; n];
    let mut on_knots = true;
    for (r, row) in model.psi.rows().iter().enumerate() {
        let (col, w) = if row.w0 == 1.0 {
            (row.col, row.w0)
        } else if row.w1 == 1.0 {
            (row.col + 1, row.w1)
        } else {
            on_knots = false;
            break;
        };
        sums[col] += w * model.y[r];
        counts[col] += 1;
    }
    if on_knots && counts.iter().all(|&c| c > 0) {
        return sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
    }
    let (t, y) = (&model.t, &model.y);
    let k = t.len() as f64;
    let tm = t.iter().sum::<f64>() / k;
    let ym = y.iter().sum::<f64>() / k;
    let sxy: f64 = t.iter().zip(y).map(|(a, b)| (a - tm) * (b - ym)).sum();
    let sxx: f64 = t.iter().map(|a| (a - tm).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    model
        .grid
        .knots()
        .iter()
        .map(|&x| ym + slope * (x - tm))
        .collect()
}

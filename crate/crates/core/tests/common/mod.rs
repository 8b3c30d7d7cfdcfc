//! Dense reference implementations shared by the integration tests. The FEM
//! matrices are rebuilt here from quadrature of the hat basis, not from the
//! closed-form entries used by the library.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use sde_spline::fem::{BandedSymmetricMatrix, DenseMatrix};

/// Three-point Gauss–Legendre nodes and weights on [-1, 1].
const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

pub fn hat(knots: &[f64], i: usize, x: f64) -> f64 {
    let n = knots.len();
    if i > 0 && x >= knots[i - 1] && x <= knots[i] {
        return (x - knots[i - 1]) / (knots[i] - knots[i - 1]);
    }
    if i + 1 < n && x >= knots[i] && x <= knots[i + 1] {
        return (knots[i + 1] - x) / (knots[i + 1] - knots[i]);
    }
    0.0
}

/// Derivative of hat `i` on element `[t_e, t_{e+1}]`.
fn hat_slope(knots: &[f64], i: usize, e: usize) -> f64 {
    let h = knots[e + 1] - knots[e];
    if i == e {
        -1.0 / h
    } else if i == e + 1 {
        1.0 / h
    } else {
        0.0
    }
}

/// `∫ ψ_i ψ_j` by element-wise Gauss quadrature (exact for quadratics).
pub fn mass(knots: &[f64]) -> DMatrix<f64> {
    let n = knots.len();
    let mut m = DMatrix::zeros(n, n);
    for e in 0..n - 1 {
        let (a, b) = (knots[e], knots[e + 1]);
        for &(xi, wq) in &GAUSS3 {
            let x = 0.5 * (a + b) + 0.5 * (b - a) * xi;
            let w = 0.5 * (b - a) * wq;
            for i in e..=e + 1 {
                for j in e..=e + 1 {
                    m[(i, j)] += w * hat(knots, i, x) * hat(knots, j, x);
                }
            }
        }
    }
    m
}

/// `∫ ψ_i' ψ_j'`.
pub fn stiffness(knots: &[f64]) -> DMatrix<f64> {
    let n = knots.len();
    let mut g = DMatrix::zeros(n, n);
    for e in 0..n - 1 {
        let h = knots[e + 1] - knots[e];
        for i in e..=e + 1 {
            for j in e..=e + 1 {
                g[(i, j)] += h * hat_slope(knots, i, e) * hat_slope(knots, j, e);
            }
        }
    }
    g
}

/// `<ψ_i, ψ_j''>` after integration by parts, boundary rows zeroed.
pub fn h(knots: &[f64]) -> DMatrix<f64> {
    let n = knots.len();
    let mut h = -stiffness(knots);
    for j in 0..n {
        h[(0, j)] = 0.0;
        h[(n - 1, j)] = 0.0;
    }
    h
}

pub fn lumped(knots: &[f64]) -> DMatrix<f64> {
    let m = mass(knots);
    DMatrix::from_diagonal(&DVector::from_iterator(m.nrows(), m.row_iter().map(|r| r.sum())))
}

fn inv_diag(d: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_diagonal(&d.diagonal().map(|v| 1.0 / v))
}

pub fn q_global(knots: &[f64]) -> DMatrix<f64> {
    let h = h(knots);
    h.transpose() * inv_diag(&lumped(knots)) * h
}

pub fn q_sde1(knots: &[f64], lambda: &[f64]) -> DMatrix<f64> {
    let h = h(knots);
    let l = DMatrix::from_diagonal(&DVector::from_column_slice(lambda));
    h.transpose() * &l * inv_diag(&lumped(knots)) * &l * h
}

pub fn q_sde2(knots: &[f64], lambda: &[f64]) -> DMatrix<f64> {
    let l = DMatrix::from_diagonal(&DVector::from_column_slice(lambda));
    &l * q_global(knots) * &l
}

pub fn r(knots: &[f64], kappa: f64) -> DMatrix<f64> {
    let h = h(knots);
    let k2 = kappa * kappa;
    lumped(knots) * (k2 * k2) - (h.transpose() + &h) * k2 + q_global(knots)
}

pub fn from_dense(d: &DenseMatrix<f64>) -> DMatrix<f64> {
    let n = d.len();
    DMatrix::from_fn(n, d.first().map_or(0, Vec::len), |i, j| d[i][j])
}

pub fn from_banded(m: &BandedSymmetricMatrix<f64>) -> DMatrix<f64> {
    from_dense(&m.to_dense())
}

/// Largest entrywise difference relative to the largest oracle entry.
pub fn rel_diff(got: &DMatrix<f64>, want: &DMatrix<f64>) -> f64 {
    assert_eq!(got.shape(), want.shape());
    let scale = want.amax().max(f64::MIN_POSITIVE);
    (got - want).amax() / scale
}

/// Knots with log-uniform spacings in [0.1, 2], starting at a random offset.
pub fn random_knots<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut t = vec![rng.random_range(-5.0..5.0)];
    for _ in 1..n {
        let h = (rng.random_range(0.1f64.ln()..2.0f64.ln())).exp();
        t.push(t.last().unwrap() + h);
    }
    t
}

pub fn random_lambda<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.2f64.ln()..5.0f64.ln()).exp()).collect()
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
}

/// Maximizes `f` over a box by cyclic golden-section line searches.
pub fn coordinate_maximize(f: impl Fn(&[f64]) -> f64, start: &[f64], lo: f64, hi: f64, sweeps: usize) -> Vec<f64> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x = start.to_vec();
    for _ in 0..sweeps {
        for k in 0..x.len() {
            let (mut a, mut b) = (lo, hi);
            let eval = |x: &mut Vec<f64>, v: f64| {
                x[k] = v;
                f(x)
            };
            let mut c = b - g * (b - a);
            let mut d = a + g * (b - a);
            let mut fc = eval(&mut x, c);
            let mut fd = eval(&mut x, d);
            while b - a > 1e-10 {
                if fc > fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - g * (b - a);
                    fc = eval(&mut x, c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + g * (b - a);
                    fd = eval(&mut x, d);
                }
            }
            x[k] = 0.5 * (a + b);
        }
    }
    x
}

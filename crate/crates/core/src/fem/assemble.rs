//! Galerkin assembly of the piecewise-linear finite-element matrices and
//! the GMRF precisions built from them.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::grid::Grid;
use super::matrix::{BandedSymmetricMatrix, DiagonalMatrix, TriDiagMatrix};

/// Half-bandwidth of every precision assembled here.
pub const PRECISION_BANDWIDTH: usize = 2;

/// Second-derivative stiffness `H[i,j] = <ψ_i, ψ_j''>`. Interior rows are
/// `(1/h_{i-1}, -(1/h_{i-1} + 1/h_i), 1/h_i)`; the first and last rows are
/// zero.
pub fn build_h<T: Scalar>(grid: &Grid<T>) -> TriDiagMatrix<T> {
    let n = grid.len();
    let h = grid.spacings();
    let mut m = TriDiagMatrix::zeros(n);
    for i in 1..n - 1 {
        let left = T::one() / h[i - 1];
        let right = T::one() / h[i];
        m.sub[i - 1] = left;
        m.main[i] = -(left + right);
        m.sup[i] = right;
    }
    m
}

/// Consistent mass matrix `B[i,j] = <ψ_i, ψ_j>`.
pub fn build_b<T: Scalar>(grid: &Grid<T>) -> TriDiagMatrix<T> {
    let n = grid.len();
    let h = grid.spacings();
    let three = T::lit(3.0);
    let six = T::lit(6.0);
    let mut m = TriDiagMatrix::zeros(n);
    for j in 0..n - 1 {
        m.sub[j] = h[j] / six;
        m.sup[j] = h[j] / six;
    }
    for i in 0..n {
        let left = if i > 0 { h[i - 1] } else { T::zero() };
        let right = if i + 1 < n { h[i] } else { T::zero() };
        m.main[i] = (left + right) / three;
    }
    m
}

/// Lumped mass matrix `B̃[i,i] = <ψ_i, 1>`.
pub fn build_btilde<T: Scalar>(grid: &Grid<T>) -> DiagonalMatrix<T> {
    DiagonalMatrix::new(lumped_mass(grid)).expect("spacings are positive")
}

fn lumped_mass<T: Scalar>(grid: &Grid<T>) -> Vec<T> {
    let n = grid.len();
    let h = grid.spacings();
    let two = T::lit(2.0);
    (0..n)
        .map(|i| {
            let left = if i > 0 { h[i - 1] } else { T::zero() };
            let right = if i + 1 < n { h[i] } else { T::zero() };
            (left + right) / two
        })
        .collect()
}

/// `H' diag(weights) H` for a second-difference matrix `h`, accumulated row
/// by row. Only the interior rows of `h` contribute; the boundary entries of
/// `weights` are ignored.
pub fn weighted_second_difference_precision<T: Scalar>(
    h: &TriDiagMatrix<T>,
    weights: &[T],
) -> Result<BandedSymmetricMatrix<T>> {
    let n = h.dim();
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: weights.len(),
        });
    }
    let mut q = BandedSymmetricMatrix::zeros(n, PRECISION_BANDWIDTH);
    for k in 1..n.saturating_sub(1) {
        let stencil = [h.sub[k - 1], h.main[k], h.sup[k]];
        let d = weights[k];
        for a in 0..3 {
            let wa = d * stencil[a];
            for b in 0..=a {
                // columns k-1+a >= k-1+b
                q.add_to(k - 1 + a, k - 1 + b, wa * stencil[b]);
            }
        }
    }
    Ok(q)
}

fn inverse_lumped_mass<T: Scalar>(grid: &Grid<T>) -> Vec<T> {
    lumped_mass(grid).into_iter().map(|m| T::one() / m).collect()
}

fn check_lambda<T: Scalar>(grid: &Grid<T>, lambda: &[T]) -> Result<()> {
    if lambda.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: lambda.len(),
        });
    }
    if let Some(i) = lambda
        .iter()
        .position(|&l| !(l.is_finite_value() && l > T::zero()))
    {
        return Err(Error::Domain(format!(
            "lambda[{i}] = {} must be finite and > 0",
            lambda[i]
        )));
    }
    Ok(())
}

/// Non-adaptive precision `Q = H' B̃⁻¹ H` (rank `n - 2`, null space spanned
/// by constants and the knot vector).
pub fn build_q_global<T: Scalar>(grid: &Grid<T>) -> BandedSymmetricMatrix<T> {
    weighted_second_difference_precision(&build_h(grid), &inverse_lumped_mass(grid))
        .expect("weights sized from the grid")
}

/// Adaptive precision for `λ(t) f'' = dW/dt`: `Q_λ = H' Λ B̃⁻¹ Λ H`.
/// Independent of `λ(t_1)` and `λ(t_n)`.
pub fn build_q_sde1<T: Scalar>(grid: &Grid<T>, lambda: &[T]) -> Result<BandedSymmetricMatrix<T>> {
    check_lambda(grid, lambda)?;
    let weights: Vec<T> = inverse_lumped_mass(grid)
        .into_iter()
        .zip(lambda)
        .map(|(inv_m, &l)| l * l * inv_m)
        .collect();
    weighted_second_difference_precision(&build_h(grid), &weights)
}

/// Adaptive precision for `(λ(t) f)'' = dW/dt`: `Q_λ = Λ H' B̃⁻¹ H Λ`, with
/// the Neumann condition `λ'(t_1) = λ'(t_n) = 0` at the boundary.
pub fn build_q_sde2<T: Scalar>(grid: &Grid<T>, lambda: &[T]) -> Result<BandedSymmetricMatrix<T>> {
    check_lambda(grid, lambda)?;
    build_q_global(grid).congruence_diag(lambda)
}

/// Proper precision of the log-smoothing field from `(κ² - d²/dt²) ν = dW/dt`:
/// `R = κ⁴ B̃ - κ² (H' + H) + H' B̃⁻¹ H`.
pub fn build_r<T: Scalar>(grid: &Grid<T>, kappa: T) -> Result<BandedSymmetricMatrix<T>> {
    if !(kappa.is_finite_value() && kappa >= T::zero()) {
        return Err(Error::Domain(format!("kappa = {kappa} must be finite and >= 0")));
    }
    let n = grid.len();
    let h = build_h(grid);
    let mut r = weighted_second_difference_precision(&h, &inverse_lumped_mass(grid))?;
    let k2 = kappa * kappa;
    let k4 = k2 * k2;
    let mass = lumped_mass(grid);
    for i in 0..n {
        // (H' + H)[i,i] = 2 H[i,i]
        let sym_diag = h.main[i] + h.main[i];
        r.add_to(i, i, k4 * mass[i] - k2 * sym_diag);
        if i > 0 {
            // (H' + H)[i,i-1] = H[i-1,i] + H[i,i-1]
            let sym_off = h.sup[i - 1] + h.sub[i - 1];
            r.add_to(i, i - 1, -k2 * sym_off);
        }
    }
    Ok(r)
}

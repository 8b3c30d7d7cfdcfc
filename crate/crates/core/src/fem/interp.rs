use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::grid::Grid;
use super::matrix::BandedSymmetricMatrix;

/// Piecewise-linear basis evaluated at a set of points: row `r` holds
/// `ψ_col(x_r) = w0` and `ψ_{col+1}(x_r) = w1`, all other entries zero.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationMatrix<T> {
    ncols: usize,
    rows: Vec<InterpRow<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpRow<T> {
    pub col: usize,
    pub w0: T,
    pub w1: T,
}

impl<T: Scalar> InterpolationMatrix<T> {
    /// Basis evaluated at its own knots. Requires `n >= 2`.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 2, "a piecewise-linear basis needs two knots");
        let rows = (0..n)
            .map(|col| {
                if col + 1 < n {
                    InterpRow { col, w0: T::one(), w1: T::zero() }
                } else {
                    InterpRow { col: n - 2, w0: T::zero(), w1: T::one() }
                }
            })
            .collect();
        Self { ncols: n, rows }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[InterpRow<T>] {
        &self.rows
    }

    /// Nonzero `(column, weight)` pairs of one row.
    pub fn row_entries(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let row = self.rows[r];
        [(row.col, row.w0), (row.col + 1, row.w1)]
            .into_iter()
            .filter(|(_, w)| !w.is_zero())
    }

    /// `Ψ x`
    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                got: x.len(),
            });
        }
        Ok(self
            .rows
            .iter()
            .map(|r| {
                let mut v = r.w0 * x[r.col];
                if !r.w1.is_zero() {
                    v += r.w1 * x[r.col + 1];
                }
                v
            })
            .collect())
    }

    /// `Ψ' v`
    pub fn apply_transpose(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.rows.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rows.len(),
                got: v.len(),
            });
        }
        let mut out = vec![T::zero(); self.ncols];
        for (r, &vr) in self.rows.iter().zip(v) {
            out[r.col] += r.w0 * vr;
            if !r.w1.is_zero() {
                out[r.col + 1] += r.w1 * vr;
            }
        }
        Ok(out)
    }

    /// `Ψ' diag(d) Ψ`, tridiagonal, stored with half-bandwidth `p ≥ 1`.
    pub fn weighted_gram(&self, d: &[T], p: usize) -> Result<BandedSymmetricMatrix<T>> {
        if d.len() != self.rows.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rows.len(),
                got: d.len(),
            });
        }
        let mut g = BandedSymmetricMatrix::zeros(self.ncols, p.max(1));
        self.accumulate_weighted_gram(d, &mut g);
        Ok(g)
    }

    /// Adds `Ψ' diag(d) Ψ` into `target`, which must have bandwidth ≥ 1.
    pub fn accumulate_weighted_gram(&self, d: &[T], target: &mut BandedSymmetricMatrix<T>) {
        for (r, &dr) in self.rows.iter().zip(d) {
            target.add_to(r.col, r.col, dr * r.w0 * r.w0);
            if !r.w1.is_zero() {
                target.add_to(r.col + 1, r.col, dr * r.w0 * r.w1);
                target.add_to(r.col + 1, r.col + 1, dr * r.w1 * r.w1);
            }
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        self.rows
            .iter()
            .map(|r| {
                let mut row = vec![T::zero(); self.ncols];
                row[r.col] += r.w0;
                if !r.w1.is_zero() {
                    row[r.col + 1] += r.w1;
                }
                row
            })
            .collect()
    }
}

/// Evaluates the piecewise-linear basis of `grid` at `eval_points`. Points
/// outside `[t_1, t_n]` are clamped to the nearest boundary knot.
pub fn build_interpolation<T: Scalar>(
    eval_points: &[T],
    grid: &Grid<T>,
) -> Result<InterpolationMatrix<T>> {
    if eval_points.is_empty() {
        return Err(Error::InvalidInput("no evaluation points".into()));
    }
    let knots = grid.knots();
    let n = knots.len();
    let h = grid.spacings();
    let rows = eval_points
        .iter()
        .enumerate()
        .map(|(r, &x)| {
            if !x.is_finite_value() {
                return Err(Error::InvalidInput(format!(
                    "non-finite evaluation point at index {r}"
                )));
            }
            let row = if x <= knots[0] {
                InterpRow { col: 0, w0: T::one(), w1: T::zero() }
            } else if x >= knots[n - 1] {
                InterpRow { col: n - 2, w0: T::zero(), w1: T::one() }
            } else {
                // knots[j] <= x < knots[j+1]
                let j = knots.partition_point(|&k| k <= x) - 1;
                let frac = (x - knots[j]) / h[j];
                InterpRow { col: j, w0: T::one() - frac, w1: frac }
            };
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InterpolationMatrix { ncols: n, rows })
}

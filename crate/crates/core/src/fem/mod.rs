//! Piecewise-linear finite elements on a 1-D mesh: stiffness and mass
//! matrices, the spline precisions derived from them, and basis evaluation.

mod assemble;
mod grid;
mod interp;
mod matrix;

pub use assemble::{
    build_b, build_btilde, build_h, build_q_global, build_q_sde1, build_q_sde2, build_r,
    weighted_second_difference_precision, PRECISION_BANDWIDTH,
};
pub use grid::{build_grid, Grid, MIN_KNOTS, MIN_SUBKNOTS};
pub use interp::{build_interpolation, InterpRow, InterpolationMatrix};
pub use matrix::{BandedSymmetricMatrix, DenseMatrix, DiagonalMatrix, TriDiagMatrix};

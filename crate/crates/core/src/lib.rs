//! Bayesian adaptive smoothing splines built from stochastic differential
//! equations.
//!
//! A cubic smoothing spline prior arises as the Galerkin solution of
//! `f'' = dW/dt` with piecewise-linear elements; making the smoothing
//! parameter a function `λ(t)` gives two adaptive variants. All three yield
//! banded precision matrices, so posterior simulation is linear in the
//! number of knots.
//!
//! - [`fem`]: mesh, finite-element matrices and precisions (generic scalar).
//! - [`linalg`]: banded Cholesky, solves and exact GMRF sampling.
//! - [`mcmc`]: the Metropolis-within-Gibbs engine.
//! - [`bench`]: the simulation study harness.
//! - [`cli`]: the command-line front end.

// NaN must fail positivity checks, so `!(x > 0)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bench;
pub mod cli;
pub mod error;
pub mod fem;
pub mod linalg;
pub mod mcmc;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

use num_rational::Rational64;

pub type Grid64 = fem::Grid<f64>;
pub type Grid32 = fem::Grid<f32>;
pub type ExactGrid = fem::Grid<Rational64>;

pub type BandedMatrix64 = fem::BandedSymmetricMatrix<f64>;
pub type BandedMatrix32 = fem::BandedSymmetricMatrix<f32>;
pub type ExactBandedMatrix = fem::BandedSymmetricMatrix<Rational64>;

pub type TriDiag64 = fem::TriDiagMatrix<f64>;
pub type Diagonal64 = fem::DiagonalMatrix<f64>;
pub type Interpolation64 = fem::InterpolationMatrix<f64>;
pub type Cholesky64 = linalg::BandedCholesky<f64>;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Minimum number of knots for a spline mesh: the second-order precision
/// has rank `n - 2`, so fewer than four knots leave at most one free
/// direction.
pub const MIN_KNOTS: usize = 4;

/// Minimum number of knots for the log-smoothing (ν) basis mesh.
pub const MIN_SUBKNOTS: usize = 2;

/// Relative spacing below which a mesh is rejected as numerically degenerate.
const MIN_RELATIVE_SPACING: f64 = 1e-12;

/// Sorted, strictly increasing knot locations and their spacings.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    knots: Vec<T>,
    spacings: Vec<T>,
}

impl<T: Scalar> Grid<T> {
    /// Sorts and deduplicates `locations` into a spline mesh of at least
    /// [`MIN_KNOTS`] knots.
    pub fn new(locations: &[T]) -> Result<Self> {
        Self::with_min_len(locations, MIN_KNOTS)
    }

    /// Like [`Grid::new`] but accepting as few as `min_len` knots. Used for
    /// the coarse ν-basis mesh, whose precision is proper for any size ≥ 2.
    pub fn with_min_len(locations: &[T], min_len: usize) -> Result<Self> {
        if let Some(bad) = locations.iter().position(|v| !v.is_finite_value()) {
            return Err(Error::InvalidInput(format!(
                "non-finite location at index {bad}"
            )));
        }
        let mut knots = locations.to_vec();
        knots.sort_by(|a, b| a.partial_cmp(b).expect("finite values are ordered"));
        knots.dedup();
        if knots.len() < min_len.max(2) {
            return Err(Error::DegenerateGrid(format!(
                "need at least {} distinct locations, got {}",
                min_len.max(2),
                knots.len()
            )));
        }
        let spacings: Vec<T> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        let range = knots[knots.len() - 1] - knots[0];
        let inv_tol = T::lit(1.0 / MIN_RELATIVE_SPACING);
        if let Some(j) = spacings.iter().position(|&h| h * inv_tol < range) {
            return Err(Error::DegenerateGrid(format!(
                "spacing {} between knots {j} and {} is below {MIN_RELATIVE_SPACING:e} of the range",
                spacings[j],
                j + 1
            )));
        }
        Ok(Self { knots, spacings })
    }

    /// `n` evenly spaced knots over `[lo, hi]`, both endpoints included.
    pub fn regular(lo: T, hi: T, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::DegenerateGrid(format!("regular grid of {n} points")));
        }
        let steps = T::from_usize(n - 1).expect("grid size fits the scalar");
        let locs: Vec<T> = (0..n)
            .map(|i| {
                let i = T::from_usize(i).expect("index fits the scalar");
                lo + (hi - lo) * i / steps
            })
            .collect();
        Self::with_min_len(&locs, n.min(MIN_KNOTS))
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    /// `h_j = t_{j+1} - t_j`, length `n - 1`.
    pub fn spacings(&self) -> &[T] {
        &self.spacings
    }

    pub fn first(&self) -> T {
        self.knots[0]
    }

    pub fn last(&self) -> T {
        self.knots[self.knots.len() - 1]
    }

    /// Knots at `m` equally spaced empirical quantiles of this grid's knots,
    /// linearly interpolated between order statistics.
    pub fn quantile_subgrid(&self, m: usize) -> Result<Self> {
        let n = self.len();
        if m < MIN_SUBKNOTS || m > n {
            return Err(Error::InvalidInput(format!(
                "subknot count {m} must lie in [{MIN_SUBKNOTS}, {n}]"
            )));
        }
        if m == n {
            return Ok(self.clone());
        }
        let last = T::from_usize(n - 1).unwrap();
        let denom = T::from_usize(m - 1).unwrap();
        let locs: Vec<T> = (0..m)
            .map(|k| {
                let pos = T::from_usize(k).unwrap() * last / denom;
                let lo = pos.to_f64().unwrap().floor() as usize;
                let lo = lo.min(n - 2);
                let frac = pos - T::from_usize(lo).unwrap();
                self.knots[lo] + frac * (self.knots[lo + 1] - self.knots[lo])
            })
            .collect();
        Self::with_min_len(&locs, MIN_SUBKNOTS)
    }
}

/// Builds a spline mesh from observation locations (sort + deduplicate).
pub fn build_grid<T: Scalar>(locations: &[T]) -> Result<Grid<T>> {
    Grid::new(locations)
}

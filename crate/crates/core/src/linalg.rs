//! Banded Cholesky factorization, solves, log-determinants and exact
//! sampling of Gaussian Markov random fields in canonical form.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fem::BandedSymmetricMatrix;
use crate::scalar::{Real, Scalar};

/// Pivots at or below this fraction of the largest diagonal entry are
/// treated as a loss of positive definiteness.
pub const PIVOT_RELATIVE_TOLERANCE: f64 = 1e-12;

/// Lower-triangular banded factor `L` with `L L' = A`, stored like
/// [`BandedSymmetricMatrix`]: `l[i * (p+1) + k] = L[i, i-k]`.
#[derive(Debug, Clone)]
pub struct BandedCholesky<T> {
    n: usize,
    p: usize,
    l: Vec<T>,
}

impl<T: Real> BandedCholesky<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        if j > i || i - j > self.p {
            T::zero()
        } else {
            self.l[i * (self.p + 1) + (i - j)]
        }
    }

    fn check_rhs(&self, len: usize) -> Result<()> {
        if len == self.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.n, got: len })
        }
    }

    /// Solves `L y = b` in place.
    pub fn forward_in_place(&self, b: &mut [T]) -> Result<()> {
        self.check_rhs(b.len())?;
        let w = self.p + 1;
        for i in 0..self.n {
            let row = &self.l[i * w..(i + 1) * w];
            let mut s = b[i];
            for k in 1..=self.p.min(i) {
                s -= row[k] * b[i - k];
            }
            b[i] = s / row[0];
        }
        Ok(())
    }

    /// Solves `L' x = y` in place.
    pub fn backward_in_place(&self, y: &mut [T]) -> Result<()> {
        self.check_rhs(y.len())?;
        let w = self.p + 1;
        for i in (0..self.n).rev() {
            let mut s = y[i];
            for k in 1..=self.p.min(self.n - 1 - i) {
                s -= self.l[(i + k) * w + k] * y[i + k];
            }
            y[i] = s / self.l[i * w];
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        let mut x = rhs.to_vec();
        self.forward_in_place(&mut x)?;
        self.backward_in_place(&mut x)?;
        Ok(x)
    }

    /// `log |A| = 2 Σ log L_ii`
    pub fn logdet(&self) -> T {
        let two = T::one() + T::one();
        two * (0..self.n)
            .map(|i| self.l[i * (self.p + 1)].ln())
            .fold(T::zero(), |a, b| a + b)
    }
}

/// Banded Cholesky factorization of a symmetric positive definite matrix.
pub fn cholesky_banded<T: Real>(m: &BandedSymmetricMatrix<T>) -> Result<BandedCholesky<T>> {
    let n = m.dim();
    let p = m.bandwidth();
    let w = p + 1;
    let a = m.bands();
    let max_diag = m
        .diagonal()
        .into_iter()
        .fold(T::zero(), |acc, d| if d > acc { d } else { acc });
    let tol = T::lit(PIVOT_RELATIVE_TOLERANCE) * max_diag;
    let mut l = vec![T::zero(); n * w];
    for i in 0..n {
        let lo = i.saturating_sub(p);
        for j in lo..=i {
            let mut s = a[i * w + (i - j)];
            // Σ_k L[i,k] L[j,k] over the shared band
            for k in lo.max(j.saturating_sub(p))..j {
                s -= l[i * w + (i - k)] * l[j * w + (j - k)];
            }
            if i == j {
                if !(s > tol) || !s.is_finite() {
                    return Err(Error::NotPositiveDefinite { pivot: i });
                }
                l[i * w] = s.sqrt();
            } else {
                l[i * w + (i - j)] = s / l[j * w];
            }
        }
    }
    Ok(BandedCholesky { n, p, l })
}

pub fn solve_banded<T: Real>(chol: &BandedCholesky<T>, rhs: &[T]) -> Result<Vec<T>> {
    chol.solve(rhs)
}

pub fn logdet_banded<T: Real>(chol: &BandedCholesky<T>) -> T {
    chol.logdet()
}

/// `x' M x`
pub fn quad_form<T: Scalar>(m: &BandedSymmetricMatrix<T>, x: &[T]) -> Result<T> {
    let n = m.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x.len() });
    }
    let p = m.bandwidth();
    let w = p + 1;
    let a = m.bands();
    let two = T::one() + T::one();
    let mut acc = T::zero();
    for i in 0..n {
        let mut off = T::zero();
        for k in 1..=p.min(i) {
            off += a[i * w + k] * x[i - k];
        }
        acc += x[i] * (a[i * w] * x[i] + two * off);
    }
    Ok(acc)
}

/// `N(P⁻¹ b, P⁻¹)` given by its precision `P` and linear term `b`.
#[derive(Debug, Clone)]
pub struct CanonicalGaussian<T> {
    pub precision: BandedSymmetricMatrix<T>,
    pub linear: Vec<T>,
}

/// A factored [`CanonicalGaussian`] with its mean solved.
#[derive(Debug, Clone)]
pub struct FactoredGaussian<T> {
    pub chol: BandedCholesky<T>,
    pub mean: Vec<T>,
}

impl<T: Real> CanonicalGaussian<T> {
    pub fn new(precision: BandedSymmetricMatrix<T>, linear: Vec<T>) -> Result<Self> {
        if linear.len() != precision.dim() {
            return Err(Error::DimensionMismatch {
                expected: precision.dim(),
                got: linear.len(),
            });
        }
        Ok(Self { precision, linear })
    }

    pub fn factor(&self) -> Result<FactoredGaussian<T>> {
        let chol = cholesky_banded(&self.precision)?;
        let mean = chol.solve(&self.linear)?;
        Ok(FactoredGaussian { chol, mean })
    }
}

impl<T: Real> FactoredGaussian<T> {
    /// Exact draw `μ + L'⁻¹ z`, `z ~ N(0, I)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T>
    where
        StandardNormal: Distribution<T>,
    {
        let mut z: Vec<T> = (0..self.chol.n).map(|_| StandardNormal.sample(rng)).collect();
        self.chol
            .backward_in_place(&mut z)
            .expect("draw sized from the factor");
        for (zi, &mi) in z.iter_mut().zip(&self.mean) {
            *zi += mi;
        }
        z
    }

    /// Log density at `x` up to the `-(n/2) log 2π` constant:
    /// `½ log|P| - ½ (x-μ)' P (x-μ)`.
    pub fn log_density_unnormalized(&self, x: &[T]) -> Result<T> {
        self.chol.check_rhs(x.len())?;
        // ‖L'(x - μ)‖²
        let n = self.chol.n;
        let w = self.chol.p + 1;
        let d: Vec<T> = x.iter().zip(&self.mean).map(|(&a, &b)| a - b).collect();
        let mut sq = T::zero();
        for j in 0..n {
            let mut v = T::zero();
            for k in 0..=self.chol.p.min(n - 1 - j) {
                v += self.chol.l[(j + k) * w + k] * d[j + k];
            }
            sq += v * v;
        }
        let half = T::lit(0.5);
        Ok(half * self.chol.logdet() - half * sq)
    }
}

/// Draws from `N(P⁻¹ b, P⁻¹)`.
pub fn sample_canonical<T: Real, R: Rng + ?Sized>(
    g: &CanonicalGaussian<T>,
    rng: &mut R,
) -> Result<Vec<T>>
where
    StandardNormal: Distribution<T>,
{
    Ok(g.factor()?.sample(rng))
}

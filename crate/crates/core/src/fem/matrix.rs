//! Compact storage for the tridiagonal, diagonal and banded symmetric
//! matrices produced by the finite-element assembly.

use crate::error::{Error, Result};
use crate::scalar::{max_abs, Scalar};

/// Dense row-major matrix, used for dumps and dense cross-checks.
pub type DenseMatrix<T> = Vec<Vec<T>>;

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// General (not necessarily symmetric) tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TriDiagMatrix<T> {
    /// `sub[i] = A[i+1, i]`
    pub sub: Vec<T>,
    pub main: Vec<T>,
    /// `sup[i] = A[i, i+1]`
    pub sup: Vec<T>,
}

impl<T: Scalar> TriDiagMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        let off = n.saturating_sub(1);
        Self {
            sub: vec![T::zero(); off],
            main: vec![T::zero(); n],
            sup: vec![T::zero(); off],
        }
    }

    pub fn dim(&self) -> usize {
        self.main.len()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i == j {
            self.main[i]
        } else if i == j + 1 {
            self.sub[j]
        } else if j == i + 1 {
            self.sup[i]
        } else {
            T::zero()
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            sub: self.sup.clone(),
            main: self.main.clone(),
            sup: self.sub.clone(),
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        let n = self.dim();
        check_len(n, x.len())?;
        Ok((0..n)
            .map(|i| {
                let mut acc = self.main[i] * x[i];
                if i > 0 {
                    acc += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.sup[i] * x[i + 1];
                }
                acc
            })
            .collect())
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }
}

/// Diagonal matrix with strictly positive entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalMatrix<T> {
    diag: Vec<T>,
}

impl<T: Scalar> DiagonalMatrix<T> {
    pub fn new(diag: Vec<T>) -> Result<Self> {
        if let Some(i) = diag.iter().position(|&d| !(d > T::zero())) {
            return Err(Error::Domain(format!(
                "diagonal entry {i} is {} (must be > 0)",
                diag[i]
            )));
        }
        Ok(Self { diag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { self.diag[i] } else { T::zero() })
                    .collect()
            })
            .collect()
    }
}

/// Symmetric matrix with half-bandwidth `p`, stored as an `n × (p+1)` panel
/// of its lower bands: `bands[i * (p+1) + k] = A[i, i-k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSymmetricMatrix<T> {
    n: usize,
    p: usize,
    bands: Vec<T>,
}

impl<T: Scalar> BandedSymmetricMatrix<T> {
    pub fn zeros(n: usize, p: usize) -> Self {
        Self {
            n,
            p,
            bands: vec![T::zero(); n * (p + 1)],
        }
    }

    pub fn identity(n: usize, p: usize) -> Self {
        Self::from_diagonal(&vec![T::one(); n], p)
    }

    pub fn from_diagonal(diag: &[T], p: usize) -> Self {
        let mut m = Self::zeros(diag.len(), p);
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Lower-triangle extraction from a dense matrix. Entries outside the
    /// band are ignored.
    pub fn from_dense_lower(dense: &[Vec<T>], p: usize) -> Self {
        let n = dense.len();
        let mut m = Self::zeros(n, p);
        for i in 0..n {
            for k in 0..=p.min(i) {
                m.set(i, i - k, dense[i][i - k]);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.p
    }

    /// Raw lower-band panel, row-major with `p + 1` entries per row.
    pub fn bands(&self) -> &[T] {
        &self.bands
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let k = hi - lo;
        (k <= self.p).then_some(hi * (self.p + 1) + k)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.slot(i, j).map_or(T::zero(), |s| self.bands[s])
    }

    /// Sets `A[i,j]` and, implicitly, `A[j,i]`. Panics outside the band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let s = self.slot(i, j).expect("entry outside the band");
        self.bands[s] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: T) {
        let s = self.slot(i, j).expect("entry outside the band");
        self.bands[s] += v;
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.bands[i * (self.p + 1)]).collect()
    }

    pub fn add_diagonal(&mut self, d: &[T]) -> Result<()> {
        check_len(self.n, d.len())?;
        for (i, &v) in d.iter().enumerate() {
            self.bands[i * (self.p + 1)] += v;
        }
        Ok(())
    }

    pub fn scale(&mut self, c: T) {
        for v in &mut self.bands {
            *v *= c;
        }
    }

    pub fn scaled(&self, c: T) -> Self {
        let mut m = self.clone();
        m.scale(c);
        m
    }

    /// `self += c * other`. `other` may have a narrower band.
    pub fn add_scaled(&mut self, c: T, other: &Self) -> Result<()> {
        check_len(self.n, other.n)?;
        if other.p > self.p {
            return Err(Error::InvalidInput(format!(
                "cannot add bandwidth {} into bandwidth {}",
                other.p, self.p
            )));
        }
        for i in 0..self.n {
            for k in 0..=other.p.min(i) {
                self.add_to(i, i - k, c * other.get(i, i - k));
            }
        }
        Ok(())
    }

    /// `D · A · D` for diagonal `D = diag(d)`.
    pub fn congruence_diag(&self, d: &[T]) -> Result<Self> {
        check_len(self.n, d.len())?;
        let mut m = self.clone();
        for i in 0..self.n {
            for k in 0..=self.p.min(i) {
                let s = i * (self.p + 1) + k;
                m.bands[s] = d[i] * self.bands[s] * d[i - k];
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        check_len(self.n, x.len())?;
        let w = self.p + 1;
        let mut y = vec![T::zero(); self.n];
        for i in 0..self.n {
            let row = &self.bands[i * w..(i + 1) * w];
            y[i] += row[0] * x[i];
            for k in 1..=self.p.min(i) {
                let j = i - k;
                y[i] += row[k] * x[j];
                y[j] += row[k] * x[i];
            }
        }
        Ok(y)
    }

    pub fn max_abs(&self) -> T {
        max_abs(&self.bands)
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

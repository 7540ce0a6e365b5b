//! Minimal dense square-matrix and vector helpers for covariance bookkeeping.

use std::ops::Index;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> SquareMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, T::one())
    }

    pub fn scaled_identity(dim: usize, scale: T) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = scale;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data
            .chunks(self.dim.max(1))
            .map(<[T]>::to_vec)
            .take(self.dim)
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> T {
        (0..self.dim).fold(T::zero(), |acc, i| acc + self[(i, i)])
    }

    /// `M·x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.dim);
        self.data
            .chunks(self.dim.max(1))
            .take(self.dim)
            .map(|row| dot(row, x))
            .collect()
    }

    /// `xᵀ·M·x`.
    pub fn quad_form(&self, x: &[T]) -> T {
        dot(x, &self.mul_vec(x))
    }

    /// In-place `M += scale·u·uᵀ`.
    pub fn rank_one_update(&mut self, u: &[T], scale: T) {
        let n = self.dim;
        for (row, &ui) in self.data.chunks_exact_mut(n.max(1)).zip(u) {
            let si = scale * ui;
            for (m, &uj) in row.iter_mut().zip(u) {
                *m = *m + si * uj;
            }
        }
    }

    /// Replaces `M` with `(M + Mᵀ)/2`.
    pub fn symmetrize(&mut self) {
        let n = self.dim;
        let half = T::lit(0.5);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = (self.data[i * n + j] + self.data[j * n + i]) * half;
                self.data[i * n + j] = v;
                self.data[j * n + i] = v;
            }
        }
    }

    /// Largest `|m_ij − m_ji|` relative to the largest absolute entry.
    pub fn max_relative_asymmetry(&self) -> f64 {
        let n = self.dim;
        let scale = self
            .data
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.as_f64().abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (self[(i, j)] - self[(j, i)]).as_f64().abs();
                worst = worst.max(d);
            }
        }
        worst / scale
    }

    /// Eigenvalues of the symmetric part, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        if n == 0 {
            return Vec::new();
        }
        let m = nalgebra::DMatrix::<f64>::from_fn(n, n, |i, j| {
            0.5 * (self[(i, j)].as_f64() + self[(j, i)].as_f64())
        });
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Checks symmetry (relative `1e-12`) and positive semi-definiteness
    /// (every eigenvalue `≥ −1e-10·trace`).
    pub fn check_covariance(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::NonFinite("covariance"));
        }
        let asym = self.max_relative_asymmetry();
        if asym > 1e-12 {
            return Err(Error::NotSymmetric(asym));
        }
        let trace = self.trace().as_f64();
        let min_ev = self.symmetric_eigenvalues().first().copied().unwrap_or(0.0);
        if min_ev < -1e-10 * trace.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::NotPositiveSemiDefinite {
                min_eigenvalue: min_ev,
                trace,
            });
        }
        Ok(())
    }
}

impl<T> Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.dim + j]
    }
}

impl<T: Scalar> TryFrom<Vec<Vec<T>>> for SquareMatrix<T> {
    type Error = Error;

    fn try_from(rows: Vec<Vec<T>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl<T: Scalar> From<SquareMatrix<T>> for Vec<Vec<T>> {
    fn from(m: SquareMatrix<T>) -> Self {
        m.rows()
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

//! Dense matrix substrate.
//!
//! [`Matrix`] is a thin wrapper over `nalgebra::DMatrix<f64>` that refuses
//! empty shapes and non-finite entries. The scalar and linear-algebra
//! primitives the solver is built from live here as free functions.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, DldlError, Result};

/// Columns with Euclidean norm at or below this are treated as zero.
pub const EPSILON_NORM: f64 = 1e-12;

/// Entrywise tolerance used when checking that a system matrix is symmetric.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// A dense, finite, non-empty `rows x cols` matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix(DMatrix<f64>);

impl Matrix {
    /// Wraps an existing nalgebra matrix, validating shape and finiteness.
    pub fn from_dmatrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(invalid(format!(
                "matrix must be non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if let Some(pos) = m.iter().position(|v| !v.is_finite()) {
            let (r, c) = (pos % m.nrows(), pos / m.nrows());
            return Err(invalid(format!("non-finite value at ({r}, {c})")));
        }
        Ok(Self(m))
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::from_dmatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_dmatrix(DMatrix::identity(n, n))
    }

    /// Builds a matrix from values listed row by row.
    pub fn from_row_slice(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(invalid(format!(
                "expected {} values for a {rows}x{cols} matrix, got {}",
                rows * cols,
                values.len()
            )));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, values))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::from_dmatrix(DMatrix::from_fn(rows, cols, f))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.0[(r, c)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Mutable access for in-crate updates. Callers must restore the
    /// finiteness invariant (see [`Matrix::ensure_finite`]).
    pub(crate) fn as_dmatrix_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.0
    }

    pub(crate) fn ensure_finite(&self, stage: &'static str) -> Result<()> {
        if self.0.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(DldlError::NonFinite(stage))
        }
    }

    pub fn column(&self, c: usize) -> DVector<f64> {
        self.0.column(c).into_owned()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    pub fn transpose(&self) -> Matrix {
        Self(self.0.transpose())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.rows();
        if n != self.cols() {
            return false;
        }
        (0..n).all(|i| (0..i).all(|j| (self.0[(i, j)] - self.0[(j, i)]).abs() <= tol))
    }
}

/// Column-per-sample feature matrix (`dim x N`).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix(Matrix);

impl FeatureMatrix {
    pub fn new(m: Matrix) -> Self {
        Self(m)
    }

    /// Builds a feature matrix from per-sample rows, as stored on disk.
    pub fn from_samples(samples: &[Vec<f64>]) -> Result<Self> {
        let n = samples.len();
        let dim = samples.first().map_or(0, Vec::len);
        if samples.iter().any(|s| s.len() != dim) {
            return Err(invalid("samples have differing dimensions"));
        }
        Matrix::from_fn(dim, n, |r, c| samples[c][r]).map(Self)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn n_samples(&self) -> usize {
        self.0.cols()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        self.0.as_dmatrix()
    }

    pub fn sample(&self, n: usize) -> DVector<f64> {
        self.0.column(n)
    }
}

/// Soft-thresholding operator `max(j - alpha, 0) + min(j + alpha, 0)`.
///
/// This is the closed-form minimiser of `0.5 s^2 - j s + alpha |s|`.
pub fn soft_threshold(j: f64, alpha: f64) -> Result<f64> {
    if !j.is_finite() || !alpha.is_finite() {
        return Err(invalid("soft_threshold requires finite inputs"));
    }
    if alpha < 0.0 {
        return Err(invalid(format!("soft_threshold alpha must be >= 0, got {alpha}")));
    }
    Ok(shrink(j, alpha))
}

#[inline]
pub(crate) fn shrink(j: f64, alpha: f64) -> f64 {
    (j - alpha).max(0.0) + (j + alpha).min(0.0)
}

/// Scales `v` to unit Euclidean norm. Returns `None` when the norm is at or
/// below [`EPSILON_NORM`]; the caller picks the fallback.
pub fn unit_normalize_column(v: &DVector<f64>) -> Option<DVector<f64>> {
    let norm = v.norm();
    if v.is_empty() || !(norm > EPSILON_NORM) {
        None
    } else {
        Some(v / norm)
    }
}

/// Solves `m z = rhs` for symmetric positive-definite `m` via Cholesky.
pub fn solve_spd_system(m: &Matrix, rhs: &Matrix) -> Result<Matrix> {
    if m.rows() != m.cols() {
        return Err(invalid(format!("system matrix must be square, got {}x{}", m.rows(), m.cols())));
    }
    if rhs.rows() != m.rows() {
        return Err(invalid(format!(
            "rhs has {} rows but system is {}x{}",
            rhs.rows(),
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_symmetric(SYMMETRY_TOL) {
        return Err(invalid("system matrix is not symmetric"));
    }
    let chol = m
        .as_dmatrix()
        .clone()
        .cholesky()
        .ok_or_else(|| DldlError::SingularSystem("Cholesky factorization failed; matrix is not positive-definite".into()))?;
    let z = chol.solve(rhs.as_dmatrix());
    Matrix::from_dmatrix(z).map_err(|_| DldlError::SingularSystem("solution is not finite".into()))
}

/// `tr(lap * m^T * m)` for a square `lap` (`n x n`) and `m` (`c x n`).
pub fn trace_quadratic(lap: &Matrix, m: &Matrix) -> Result<f64> {
    if lap.rows() != lap.cols() || m.cols() != lap.rows() {
        return Err(invalid(format!(
            "trace_quadratic shape mismatch: lap {}x{}, m {}x{}",
            lap.rows(),
            lap.cols(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(trace_quadratic_raw(lap.as_dmatrix(), m.as_dmatrix()))
}

/// `tr(lap m^T m) = sum_{c} m_c lap^T m_c^T`, evaluated as `<m lap^T ... >`
/// without forming the `n x n` Gram matrix.
pub(crate) fn trace_quadratic_raw(lap: &DMatrix<f64>, m: &DMatrix<f64>) -> f64 {
    // tr(L M^T M) = sum_{r,s} L_rs (M^T M)_sr = sum_{r,s} L_rs <M_.s, M_.r>
    //             = <M L^T, M>_F
    let ml = m * lap.transpose();
    ml.dot(m)
}

//! Dense, banded and tridiagonal linear algebra written for the beam solver:
//! Thomas and pivoted band solves, dense Gaussian elimination, and a real
//! nonsymmetric eigensolver (balancing, Householder Hessenberg reduction,
//! Francis double-shift QR).

mod banded;
mod dense;
mod eigen;
mod tridiag;

use thiserror::Error;

pub use banded::{BandedFactorization, BandedMatrix};
pub use dense::{DenseLu, DenseMatrix};
pub use eigen::{eigenvalues, spectral_radius, Spectrum};
pub use tridiag::{commutes, tridiag_solve, TridiagMatrix};

/// Relative pivot threshold: a pivot is singular when its magnitude falls
/// below this fraction of the matrix infinity norm.
pub const PIVOT_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is singular to working precision (pivot {pivot:e} at row {row})")]
    Singular { row: usize, pivot: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<(), LinalgError> {
    if expected == actual {
        Ok(())
    } else {
        Err(LinalgError::DimensionMismatch { expected, actual })
    }
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

//! Periodic Fourier representation of scalar, vector and symmetric-tensor
//! fields on an N×N grid.
//!
//! Convention used everywhere in the crate:
//! f(x) = Σ_k f̂_k e^{iξ_k·x} and ‖f‖²_{L²} = L² Σ_k |f̂_k|².
//! For symmetric tensors the pointwise norm is Frobenius, so the xy
//! component is counted twice.

pub(crate) mod fft;
mod field;
mod grid;
pub(crate) mod ops;
pub(crate) mod shells;

pub use fft::{forward_many, inverse_many, transform_forward, transform_inverse};
pub use field::{PhysicalField, Rank, SpectralField};
pub use grid::{make_grid, Grid};
pub use ops::{
    apply_multiplier, apply_radial, dealias, fractional_laplacian, lambda_s, leray_project,
    mean_is_zero,
};
pub use shells::{bump, dyadic_decompose, shell_energies, shell_weights, DyadicShells};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("grid size must be even and at least 4, got {0}")]
    InvalidGridSize(usize),
    #[error("box length must be positive and finite, got {0}")]
    InvalidLength(f64),
    #[error("shape mismatch: expected {expected} values per component, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("rank mismatch: expected {expected:?}, got {got:?}")]
    RankMismatch { expected: Rank, got: Rank },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("multiplier is not finite at xi = ({0}, {1})")]
    NonFiniteMultiplier(f64, f64),
    #[error("fractional order beta = {0} outside [1/2, 1)")]
    InvalidBeta(f64),
    #[error("negative order {0} applied to a field with nonzero mean")]
    NonzeroMean(f64),
}

/// Weights turning per-component sums into Frobenius sums.
pub(crate) fn component_weights(rank: Rank) -> &'static [f64] {
    match rank {
        Rank::Scalar => &[1.0],
        Rank::Vector => &[1.0, 1.0],
        Rank::SymTensor => &[1.0, 2.0, 1.0],
    }
}

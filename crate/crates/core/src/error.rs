//! Error types shared by all engine modules.

use thiserror::Error;

/// Errors raised by exact-arithmetic and operator routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("jet has zero constant term, not invertible")]
    ZeroConstantTerm,

    /// A coefficient at `degree` was requested but the value is only
    /// trusted strictly below `accuracy`.
    #[error("insufficient accuracy: degree {degree} not trusted (accuracy {accuracy})")]
    InsufficientAccuracy { degree: u32, accuracy: u32 },

    #[error("metric tensor is singular at the base point")]
    DegenerateMetric,

    #[error("potential has no nonzero 1/nu coefficient")]
    BadPotential,

    #[error("chart caches derivative tensors only up to order {max_order}, order {requested} requested")]
    TensorOrderUnavailable { requested: usize, max_order: usize },

    #[error("symbol depends on antiholomorphic fibre variables")]
    ZetaBarPresent,

    /// Input to the Euler inverse carries a term of fibre degree zero.
    #[error("series has a zeta-free term, not in the fibre-positive subspace")]
    NotInEDoublePrime,
}

pub type Result<T> = std::result::Result<T, Error>;

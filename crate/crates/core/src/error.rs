use thiserror::Error;

/// Errors raised by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is numerically rank deficient: smallest singular value {smallest:e} vs largest {largest:e}")]
    RankDeficient { smallest: f64, largest: f64 },

    #[error("matrix is not skew-symmetric: |S + S^T| = {0:e}")]
    NotSkew(f64),

    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("tangent vector is not horizontal at the given point")]
    TangentMismatch,

    #[error("curve basis degenerates at t = {0}")]
    RankDrop(f64),

    #[error("curve is stationary; curvature is undefined")]
    ZeroSpeed,

    #[error("basis is not orthonormal: |E^T E - I| = {0:e}")]
    NotOrthonormal(f64),

    #[error("fibre dimensions at grid point {index} are {found:?}, expected {expected:?}")]
    InconsistentFibers {
        index: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("adaptive quadrature did not reach tolerance {tol:e} (estimated error {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

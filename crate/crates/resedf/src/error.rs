use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Every weight in a weighted least-squares window is zero.
    #[error("empty window: all weights are zero")]
    EmptyWindow,

    /// No complete case fell inside any window up to the bandwidth cap.
    #[error("insufficient data: no complete case within bandwidth {max_bandwidth} of the target point")]
    InsufficientData { max_bandwidth: f64 },

    #[error("dataset has no complete cases")]
    NoCompleteCases,

    #[error("grid must be strictly increasing")]
    UnsortedGrid,

    #[error("curves are defined on different grids")]
    GridMismatch,

    /// `E[e^4] - E^2[e^3] - 1` must be positive.
    #[error("degenerate moments: E[e^4] - E^2[e^3] - 1 = {0} is not positive")]
    DegenerateMoments(f64),

    #[error("density vanishes at z = {0}; score is undefined there")]
    VanishingDensity(f64),

    #[error("quadrature failed to converge to tolerance {tol}")]
    QuadratureDivergence { tol: f64 },

    #[error("invalid error law: {0}")]
    InvalidLaw(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Malformed input data, with the offending line number.
    #[error("{path}:{line}: {message}")]
    DataFormat {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

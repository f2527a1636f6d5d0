use thiserror::Error;

/// Errors raised by every checker in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds {tol:e}")]
    NotHermitian { asymmetry: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eig:e} below -{tol:e}")]
    NotPsd { min_eig: f64, tol: f64 },

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("Schatten exponent must be positive, got {0}")]
    NonPositiveQ(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("input not normalized: squared norm {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("vector is not sorted in non-increasing order at position {0}")]
    NotSorted(usize),

    #[error("negative entry {value} at position {index}")]
    NegativeEntry { index: usize, value: f64 },

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("not a probability vector: {0}")]
    NotProbability(String),

    #[error("dimension {d} exceeds the exhaustive-search limit {max}")]
    TooLarge { d: usize, max: usize },

    #[error("quadrature on [{a}, {b}] did not reach tolerance {tol:e}")]
    QuadratureFailure { a: f64, b: f64, tol: f64 },

    #[error("root not bracketed for level {level}")]
    RootNotBracketed { level: f64 },

    #[error("step {step} of the interlacing chain failed with slack {slack:e}")]
    StepFailed { step: char, slack: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

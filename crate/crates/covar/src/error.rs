use thiserror::Error;

/// Errors produced by the covariance-matrix toolkit.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix dimension {dim} is odd; phase-space matrices are 2N x 2N")]
    OddDimension { dim: usize },

    #[error("mode count must be at least one")]
    ZeroModes,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (max deviation {deviation:.3e}, tolerance {tolerance:.3e})")]
    Asymmetric { deviation: f64, tolerance: f64 },

    #[error(
        "uncertainty relation violated: min eigenvalue of gamma + i*sigma is {min_eigenvalue:.6e}"
    )]
    UncertaintyViolated { min_eigenvalue: f64 },

    #[error("matrix is not symplectic (max deviation {deviation:.3e}, tolerance {tolerance:.3e})")]
    NotSymplectic { deviation: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.6e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error(
        "degenerate input: matrix is singular or nearly so (min eigenvalue {min_eigenvalue:.6e})"
    )]
    DegenerateInput { min_eigenvalue: f64 },

    #[error("invalid split {n_a}|{n_b} for {modes} modes")]
    InvalidSplit {
        n_a: usize,
        n_b: usize,
        modes: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("inconsistent Simon invariants (discriminant {discriminant:.6e})")]
    InconsistentInvariants { discriminant: f64 },

    #[error(
        "witness certification failed: min eigenvalue {min_eigenvalue:.6e}, \
         str[Z_A] + str[Z_B] = {str_sum:.12}"
    )]
    CertificationFailed { min_eigenvalue: f64, str_sum: f64 },

    #[error("empty witness family")]
    EmptyFamily,

    #[error("noise constraint violated (margin {margin:.6e})")]
    NoiseConstraintViolated { margin: f64 },

    #[error("estimation step {step} hit a degenerate intermediate: {detail}")]
    EstimationStep { step: u8, detail: String },

    #[error("invalid measurement plan: {0}")]
    InvalidPlan(String),
}

pub type Result<T> = std::result::Result<T, Error>;

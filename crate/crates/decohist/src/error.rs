use thiserror::Error;

/// Errors shared across the solver modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {defect:.3e}, tolerance {tol:.3e})")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("operator is not a projector (idempotency defect {defect:.3e})")]
    NotProjector { defect: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("projector family violates completeness/orthogonality: {0}")]
    BadProjectorFamily(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("truncation unreliable: {0}")]
    TruncationUnreliable(String),

    #[error("quadratic form is not integrable: {0}")]
    FormNotIntegrable(String),

    #[error("boundary mass {mass:.3e} exceeds tolerance {tol:.3e}; enlarge the domain")]
    BoundaryMassExceeded { mass: f64, tol: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("step-size bound violated: {0}")]
    StepSize(String),

    #[error("empty trajectory ensemble")]
    EmptyEnsemble,

    #[error("expression error: {0}")]
    Expr(String),

    #[error("serialization error: {0}")]
    Serialization(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

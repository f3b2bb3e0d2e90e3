use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Error)]
pub enum LquError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("not a quantum state: minimum eigenvalue {min_eigenvalue:.3e}")]
    NotAState { min_eigenvalue: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid matrix data: {0}")]
    InvalidMatrix(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, LquError>;

pub(crate) fn shape_mismatch(expected: impl ToString, found: impl ToString) -> LquError {
    LquError::ShapeMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QfcError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular parameters: {0}")]
    Singular(String),

    #[error("numerical failure: {what} (achieved {achieved:.3e}, requested {requested:.3e})")]
    Convergence {
        what: String,
        achieved: f64,
        requested: f64,
    },

    #[error("truncation too small: leakage {leakage:.3e} exceeds {limit:.3e} at dimension {dim}")]
    Truncation { leakage: f64, limit: f64, dim: usize },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, QfcError>;

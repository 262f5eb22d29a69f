use thiserror::Error;

pub type Result<T> = std::result::Result<T, LrhError>;

#[derive(Debug, Error)]
pub enum LrhError {
    /// Transform entry points only accept n = 2^J with J >= 1.
    #[error("signal length {len} is not a power of two >= 2")]
    Length { len: usize },

    #[error("inconsistent shape: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A (smooth, coefficient) pair has no preimage under the likelihood
    /// ratio Haar transform. Scale `j` is 1-based (finest = 1), location `k`
    /// is 1-based within the scale.
    #[error("infeasible coefficient at scale {j}, location {k}: {reason}")]
    Infeasible { j: usize, k: usize, reason: String },

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("parse error at row {row}: {msg}")]
    Parse { row: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl LrhError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        LrhError::Domain(msg.into())
    }
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid generalized Cartan matrix: {0}")]
    InvalidGcm(String),

    #[error("no Coxeter exponent for off-diagonal pair ({a}, {b}): {reason}")]
    InvalidCoxeterPair { a: i64, b: i64, reason: &'static str },

    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("element limit {limit} exceeded while enumerating length {reached}")]
    ResourceLimit { limit: usize, reached: usize },

    #[error("precision underflow: need coefficients below t^{needed}, only known below t^{available}")]
    Precision { needed: i64, available: i64 },

    #[error("unsupported field order {q}: {reason}")]
    UnsupportedField { q: u32, reason: &'static str },

    #[error("element rejected: {0}")]
    NotInModel(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

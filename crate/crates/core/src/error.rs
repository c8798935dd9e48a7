use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coordinate index {index} out of range for dimension N={dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("resolvent symbols have different bases")]
    MixedBases,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("not a quadratic symbol: {0}")]
    NotQuadratic(String),

    #[error("function jet is formal and cannot be evaluated: {0}")]
    FormalFunction(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("energy {energy} is not above the potential minimum {minimum}")]
    BelowMinimum { energy: f64, minimum: f64 },

    #[error("root not bracketed: {0}")]
    NotBracketed(String),

    #[error("potential is not confining: {0}")]
    NotConfining(String),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

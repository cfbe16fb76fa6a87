use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symplectic (row {row} vs {col})")]
    NotSymplectic { row: usize, col: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dense dimension {dim} exceeds cap {cap}")]
    DenseCap { dim: usize, cap: usize },

    #[error("block of {size} qubits exceeds limit {limit}; rerun qubit-cost minimization")]
    BlockTooLarge { size: usize, limit: usize },

    #[error("sector enumeration of {size} tuples exceeds cap {cap}; exploit independent symmetries recursively")]
    SectorCap { size: usize, cap: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

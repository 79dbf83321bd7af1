use thiserror::Error;

use crate::color::Color;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("inconsistent code {label}: X row {x_row} and Z row {z_row} overlap oddly")]
    InconsistentCode { label: String, x_row: usize, z_row: usize },

    #[error("budget exceeded: {what} needs {needed}, limit {limit}")]
    Budget {
        what: &'static str,
        needed: f64,
        limit: f64,
    },

    #[error("construction failed for {label}: n={n}, rank(Hx)={rank_x}, rank(Hz)={rank_z}, k={k}")]
    Construction {
        label: String,
        n: usize,
        rank_x: usize,
        rank_z: usize,
        k: isize,
    },

    #[error("fixture mismatch: {0}")]
    FixtureMismatch(String),

    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error("boundary for colour {0} is not the one carrying the canonical X logical")]
    NonCanonicalBoundary(Color),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("embedding inconsistency: {0}")]
    Embedding(String),

    #[error("{needed} qubits exceeds the simulator budget of {limit}")]
    QubitBudget { needed: usize, limit: usize },

    #[error("measurement branch has zero probability (p = {0:e})")]
    ZeroProbability(f64),

    #[error("mapping error: {0}")]
    Mapping(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

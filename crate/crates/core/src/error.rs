use thiserror::Error;

/// Errors raised by the library. Identity failures are never errors; they are
/// reported through [`crate::report::CheckRecord`]s.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {0} out of range (expected 1..=3)")]
    IndexOutOfRange(usize),

    #[error("degenerate symbol: xi = 0 and m = 0 has no spectral gap")]
    DegenerateSymbol,

    #[error("block size mismatch: {0}")]
    BlockSizeMismatch(String),

    #[error("internal consistency check failed: {what} (deviation {deviation:e})")]
    InternalConsistency { what: String, deviation: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("coincident singularities: y2 = 0")]
    CoincidentSingularity,

    #[error("dimension {dim} too large for dense assembly (limit {limit})")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("operator is not Hermitian: |<Ox,y> - <x,Oy>| = {deviation:e} exceeds {bound:e}")]
    NonHermitian { deviation: f64, bound: f64 },

    #[error("bound is vacuous: mu_hat = {0} must satisfy 0 <= mu_hat < sqrt(3)/2")]
    VacuousBound(f64),

    #[error("field vanishes identically")]
    ZeroField,

    #[error("invalid probe specification: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed field file: {0}")]
    MalformedFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

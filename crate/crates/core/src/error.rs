use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("cell ({row}, {col}) is outside a {n}x{d} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        n: usize,
        d: usize,
    },

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible point: {0}")]
    Infeasible(String),

    /// Signals a violated internal invariant, e.g. two provably valid
    /// intervals that fail to intersect.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("unsupported file version {0}")]
    UnsupportedVersion(u32),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

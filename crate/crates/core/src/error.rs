use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Numerical verification failures are never errors: they are recorded as
/// residuals and verdicts in the relevant report. Errors are reserved for
/// inputs that cannot be processed at all.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch ({left} vs {right})")]
    DimensionMismatch {
        op: &'static str,
        left: String,
        right: String,
    },

    #[error("{op}: expected a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("entry count {found} does not match {rows}x{cols}")]
    EntryCount {
        rows: usize,
        cols: usize,
        found: usize,
    },

    #[error("{kernel} did not converge on a {rows}x{cols} input")]
    NoConvergence {
        kernel: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("matrix is not Hermitian positive semidefinite: {reason} (value {value:e})")]
    NotPositive { reason: &'static str, value: f64 },

    #[error(
        "system has no reduced solution: range-inclusion residual {residual:e} exceeds {bound:e}"
    )]
    Unsolvable { residual: f64, bound: f64 },

    #[error("block extraction is inconsistent: {block} residual {residual:e}")]
    InconsistentBlocks { block: &'static str, residual: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("requested rank {rank} exceeds min({rows}, {cols})")]
    RankOutOfBounds {
        rows: usize,
        cols: usize,
        rank: usize,
    },

    #[error("invalid exponent {0}: must be positive and finite")]
    InvalidExponent(f64),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

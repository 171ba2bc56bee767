//! Crate-wide error type. Every fallible operation returns [`Result`].

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Grid construction rejected (size, period or dealias fraction out of range).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A scalar parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A field or coefficient array contains NaN or infinity.
    #[error("non-finite data: {0}")]
    NonFinite(String),

    /// Two operands live on different grids.
    #[error("grid mismatch between operands")]
    GridMismatch,

    /// Trajectory times do not line up with the requested time grid.
    #[error("time grid mismatch: {0}")]
    TimeMismatch(String),

    /// Spectral coefficients are not conjugate-symmetric, so no real
    /// inverse transform exists.
    #[error("Hermitian symmetry violated (defect {defect:.3e})")]
    HermitianViolation { defect: f64 },

    /// Time stepping produced a non-finite value.
    #[error("non-finite value encountered at step {step}")]
    NanAtStep { step: usize },

    /// Config file could not be parsed; `line` is 1-based.
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    /// Snapshot file is malformed or truncated.
    #[error("snapshot format error: {0}")]
    Snapshot(String),

    /// A verification probe could not be evaluated with the given inputs.
    #[error("probe error: {0}")]
    Probe(String),

    /// An error that occurred inside a named workflow stage; the wrapper
    /// tells the operator where to look.
    #[error("{stage} stage: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("ticks decrease at index {index}")]
    Ordering { index: usize },

    #[error("duplicate tick at index {index} (enable dedup to drop zero gaps)")]
    DuplicateTick { index: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("index {index} out of range 1..={len}")]
    Bounds { index: usize, len: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("closed-form SRA diverges at n = 1")]
    Divergence,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("length mismatch: {left} vs {right}")]
    Shape { left: usize, right: usize },

    /// The solver hit its iteration cap; `best` is the lowest-cost iterate seen.
    #[error("fit did not converge after {iterations} iterations")]
    Convergence {
        iterations: usize,
        best: Box<crate::fit::FitResult>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Broad error classes, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Data,
    Convergence,
    Config,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse { .. } | Error::Ordering { .. } | Error::Json(_) | Error::Csv(_) => {
                ErrorClass::Parse
            }
            Error::DuplicateTick { .. }
            | Error::InsufficientData(_)
            | Error::Bounds { .. }
            | Error::Domain(_)
            | Error::Divergence
            | Error::ModelMismatch(_)
            | Error::Shape { .. } => ErrorClass::Data,
            Error::Convergence { .. } => ErrorClass::Convergence,
            Error::Parameter(_) | Error::Config(_) => ErrorClass::Config,
            Error::Io(_) => ErrorClass::Io,
        }
    }
}

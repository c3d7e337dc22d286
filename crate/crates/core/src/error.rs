use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported field: p = {p}, degree {n}")]
    UnsupportedField { p: u32, n: usize },
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("empty input: {0}")]
    Empty(String),
    #[error("zero code has no minimum distance")]
    ZeroCode,
    #[error("not a spread set: {0}")]
    NotSpreadSet(String),
    #[error("norm condition violated")]
    NormCondition,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("report format: {0}")]
    Report(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

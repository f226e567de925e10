use thiserror::Error;

/// Errors surfaced by the library. Each variant carries enough context to
/// print a useful one-line message on the command line.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{what} exceeds the desk-scale cap ({got} > {cap})")]
    SizeCap { what: &'static str, got: usize, cap: usize },
    #[error("qubit {qubit} out of range for a {count}-qubit circuit")]
    QubitRange { qubit: usize, count: usize },
    #[error("cannot export gate `{0}`: lower the circuit first")]
    Unlowered(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("block is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("register mismatch: {0}")]
    RegisterMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },

    /// A combinatorial guard was exceeded; the limit is named so callers can
    /// raise it deliberately.
    #[error("refused: {what} is {value}, limit is {limit}")]
    Refused {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("construction failed: {reason} (eigenvalue {eigenvalue:e})")]
    Construction { reason: String, eigenvalue: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn is_refusal(&self) -> bool {
        matches!(self, Error::Refused { .. })
    }
}

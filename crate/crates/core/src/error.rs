use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// The ramified configuration: an edge fixed by `w_q` with fixed endpoints.
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),

    #[error("class set did not saturate: mass {found} != expected {expected}")]
    MassMismatch { found: String, expected: String },

    #[error("enumeration bound exceeded: {0}")]
    EnumerationOverflow(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("ambiguous labelling: {0}")]
    Ambiguous(String),

    #[error("internal invariant broken: {0}")]
    Internal(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

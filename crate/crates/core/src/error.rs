use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("degenerate transducer: {0}")]
    Degenerate(String),
    #[error("depth exceeded: {0}")]
    DepthExceeded(String),
    #[error("image is not clopen: {0}")]
    NotClopen(String),
    #[error("empty preimage: {0}")]
    EmptyPreimage(String),
    #[error("not synchronizing: {0}")]
    NotSynchronizing(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("not in group: {0}")]
    NotInGroup(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("not orderable: {0}")]
    NotOrderable(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::AlphabetMismatch(_) => "alphabet-mismatch",
            Error::Degenerate(_) => "degenerate",
            Error::DepthExceeded(_) => "depth-exceeded",
            Error::NotClopen(_) => "not-clopen",
            Error::EmptyPreimage(_) => "empty-preimage",
            Error::NotSynchronizing(_) => "not-synchronizing",
            Error::NotInvertible(_) => "not-invertible",
            Error::ResourceLimit(_) => "resource-limit",
            Error::NotInGroup(_) => "not-in-group",
            Error::SearchExhausted(_) => "search-exhausted",
            Error::NotOrderable(_) => "not-orderable",
            Error::Parse { .. } => "parse",
            Error::Internal(_) => "internal",
        }
    }
}

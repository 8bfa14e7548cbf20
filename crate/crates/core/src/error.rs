use thiserror::Error;

/// Library-wide error type. `Capacity` maps to a distinct process exit code in
/// the CLI, everything else is an ordinary failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index out of range: {0}")]
    Index(String),

    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("empty class")]
    EmptyClass,

    #[error("unsupported class: {0}")]
    UnsupportedClass(String),

    #[error("capacity exceeded: {what} needs {needed}, cap is {cap}")]
    Capacity {
        what: String,
        needed: u128,
        cap: u128,
    },

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("boosting failed: {0}")]
    BoostFailure(String),

    #[error("sample not realizable by the class")]
    Unrealizable,

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn capacity(what: impl Into<String>, needed: u128, cap: u128) -> Self {
        Error::Capacity {
            what: what.into(),
            needed,
            cap,
        }
    }
}

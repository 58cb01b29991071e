use thiserror::Error;

/// Errors raised by the arithmetic, simulation, scheme and attack layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("state dimension {requested} exceeds the cap of {cap} amplitudes")]
    Resource { requested: u128, cap: usize },

    #[error("register {0} is entangled with the remaining registers and cannot be discarded")]
    Entangled(usize),

    #[error("oracle budget exhausted: {allowed} quantum call(s) allowed")]
    BudgetExhausted { allowed: u64 },

    #[error("brute-force enumeration over {0} points exceeds the limit")]
    EnumerationTooLarge(u128),

    #[error("malformed message: {0}")]
    Message(String),

    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

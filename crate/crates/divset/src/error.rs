use thiserror::Error;

/// Crate-wide error type.
///
/// Variant choice maps onto the CLI exit-code contract: parameter problems,
/// unreadable or malformed instances, and internal invariant violations are
/// distinguishable by the caller.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("instance too large for exhaustive search: n = {n}, cap = {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("initial solution {index} is infeasible: {reason}")]
    InfeasibleInitial { index: usize, reason: String },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}

use thiserror::Error;

/// Failure taxonomy for the whole crate. The CLI maps variants to exit codes:
/// usage problems exit 1, bad input data exits 2, capacity and budget limits
/// exit 3.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller asked for something contradictory (bad flag combination,
    /// zero trials, mismatched widths in an API call).
    #[error("usage: {0}")]
    Usage(String),

    /// Input data is malformed or violates a documented invariant.
    #[error("invalid input: {0}")]
    Input(String),

    /// A size limit would be exceeded (qubit cap, table bound).
    #[error("capacity: {0}")]
    Capacity(String),

    /// Exact enumeration would exceed the configured work budget.
    #[error("budget: {0}")]
    Budget(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Input(_) | Error::Io(_) => 2,
            Error::Capacity(_) | Error::Budget(_) => 3,
        }
    }
}

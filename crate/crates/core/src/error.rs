use thiserror::Error;

/// Failure modes shared by every counting routine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or out-of-domain user input.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A table-based method was asked for an argument beyond its size guard.
    #[error("argument {value} exceeds the table guard {guard}")]
    ResourceLimit { value: String, guard: u64 },
    /// The requested method does not apply to this equation or argument.
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),
    /// Two routes that must agree did not. Always a bug, never a user error.
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

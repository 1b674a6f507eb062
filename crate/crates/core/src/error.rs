use thiserror::Error;

/// Errors raised by the arithmetic, enumeration and verification routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZero,

    /// A computation would exceed one of the enumeration or series guards.
    #[error("size guard exceeded: {what} is {value}, limit {limit}")]
    Guard {
        what: &'static str,
        value: String,
        limit: String,
    },

    #[error("unsupported characteristic: q = {0} is even, odd q required")]
    EvenCharacteristic(u64),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("projective point with all coordinates zero")]
    ZeroPoint,

    #[error("valuation of zero is undefined")]
    ZeroValuation,

    #[error("point is rational over the base field, expected degree 2")]
    WrongDegree,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn guard(what: &'static str, value: impl ToString, limit: impl ToString) -> Self {
        Error::Guard {
            what,
            value: value.to_string(),
            limit: limit.to_string(),
        }
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use alloc::string::String;
use core::fmt;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two vectors (or a vector and a set) disagree in dimension.
    DimensionMismatch { expected: usize, found: usize },
    /// A parameter is outside its admissible range.
    InvalidParameter(String),
    /// A point lies outside the domain of the function being evaluated.
    OutsideDomain(String),
    /// A game log is missing data required by an evaluator.
    IncompleteLog(String),
    /// The schedule violates a monotonicity precondition of a bound.
    SchedulePrecondition(String),
    /// The bound and the log come from incompatible strategy / map pairs.
    Incompatible(String),
    /// The adversary exposes no loss values (monotone feedback).
    NoLossValues,
    /// A search budget was too small to perform any work.
    BudgetExhausted,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::OutsideDomain(msg) => write!(f, "outside domain: {msg}"),
            Error::IncompleteLog(msg) => write!(f, "incomplete log: {msg}"),
            Error::SchedulePrecondition(msg) => write!(f, "schedule precondition violated: {msg}"),
            Error::Incompatible(msg) => write!(f, "incompatible configuration: {msg}"),
            Error::NoLossValues => {
                write!(f, "adversary has no evaluable losses; use the monotone module")
            }
            Error::BudgetExhausted => write!(f, "search budget exhausted before one restart"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

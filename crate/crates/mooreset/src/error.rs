use std::fmt;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// `p` passed to a field constructor is not prime.
    NonPrime(u64),
    /// A user-supplied modulus is not monic/irreducible of the right degree.
    BadModulus(String),
    /// Field or enumeration parameters out of the supported range.
    InvalidParameter(String),
    /// Inversion of the zero element.
    DivisionByZero,
    /// Exponent list contains duplicates mod n, or more than n entries.
    BadExponentSet(String),
    /// Matrix dimensions do not match the operation.
    DimensionMismatch(String),
    /// A precondition documented on the operation does not hold.
    Precondition(String),
    /// Enumeration or term count exceeds the configured budget.
    BudgetExceeded { needed: String, budget: String },
    /// Multivariate division left a nonzero remainder.
    InexactDivision,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPrime(p) => write!(f, "{p} is not prime"),
            Error::BadModulus(m) => write!(f, "bad modulus: {m}"),
            Error::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::BadExponentSet(m) => write!(f, "bad exponent set: {m}"),
            Error::DimensionMismatch(m) => write!(f, "dimension mismatch: {m}"),
            Error::Precondition(m) => write!(f, "precondition violated: {m}"),
            Error::BudgetExceeded { needed, budget } => {
                write!(f, "budget exceeded: need {needed}, budget {budget}")
            }
            Error::InexactDivision => write!(f, "inexact division"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// `a + ell_N/2` (or another index that must be whole) is fractional.
    #[error("index is not an integer: {0}")]
    NonIntegralIndex(String),
    /// Input outside the domain where the requested form is defined.
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    /// A lattice sum whose support polyhedron is unbounded, so the sum is not a polynomial.
    #[error("unbounded support: {0}")]
    Unbounded(String),
    #[error("escalation did not stabilise: {0}")]
    NoConvergence(String),
    /// Two forms that must agree do not.
    #[error("inconsistent: {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Exit status used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget(_) | Error::Unbounded(_) | Error::NoConvergence(_) => 3,
            Error::Inconsistent(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violates an operation's precondition.
    Domain(String),
    /// The boundary geometry is outside what the recursion supports.
    UnsupportedGeometry(String),
    /// An iterative method failed to reach its tolerance.
    NonConvergence(String),
    /// The linear coefficient map at some order of the recursion vanished.
    Degenerate { order: usize, slope: f64 },
    /// The coefficient of `d^n log d` did not vanish before `c_{n,1}` was inserted.
    LogSlotNonzero { value: f64 },
    /// Least-squares design matrix is numerically rank deficient.
    IllConditioned(String),
    /// Shooting could not bracket the boundary value.
    NoSolution(String),
    /// The spectrum of `A(u)` left the Gårding cone.
    Admissibility { r: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by invalid input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::UnsupportedGeometry(_))
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::UnsupportedGeometry(m) => write!(f, "unsupported geometry: {m}"),
            Error::NonConvergence(m) => write!(f, "no convergence: {m}"),
            Error::Degenerate { order, slope } => {
                write!(f, "degenerate recursion at order {order} (slope {slope:e})")
            }
            Error::LogSlotNonzero { value } => {
                write!(f, "coefficient of d^n log d is {value:e}, expected 0")
            }
            Error::IllConditioned(m) => write!(f, "ill-conditioned fit: {m}"),
            Error::NoSolution(m) => write!(f, "no solution: {m}"),
            Error::Admissibility { r } => write!(f, "spectrum left the cone at r = {r}"),
        }
    }
}

impl core::error::Error for Error {}

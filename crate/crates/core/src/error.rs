use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid weight: non-positive value {value} at {index:?}")]
    InvalidWeight { index: Vec<i64>, value: f64 },
    #[error("invalid weight family: {0}")]
    InvalidFamily(String),
    #[error("filter is not invertible (minimum symbol modulus {min_modulus:e})")]
    NotInvertible { min_modulus: f64 },
    #[error("tolerance {tolerance:e} unreachable, best residual {best_residual:e}")]
    ToleranceUnreachable { tolerance: f64, best_residual: f64 },
    #[error("numerically singular system (smallest singular value {smallest_singular_value:e})")]
    SingularSystem { smallest_singular_value: f64 },
    #[error("symbol has {count} zero(s) on the unit circle; use the singular inversion")]
    SingularSymbol { count: usize },
    #[error("symbol has no zero on the unit circle; use the exact stable inversion")]
    WrongBranch,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("periodization not converged at n_trunc = {n_trunc} (tail ratio {ratio:e})")]
    IncreaseTruncation { n_trunc: usize, ratio: f64 },
    #[error("K_sum = {k_sum} too small: tail estimate {tail:e} exceeds {tolerance:e}")]
    KSumTooSmall { k_sum: usize, tail: f64, tolerance: f64 },
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Whether the failure is mathematical (as opposed to bad usage or input).
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self,
            Error::NotInvertible { .. }
                | Error::ToleranceUnreachable { .. }
                | Error::SingularSystem { .. }
                | Error::SingularSymbol { .. }
                | Error::WrongBranch
                | Error::DegenerateInput(_)
                | Error::IncreaseTruncation { .. }
                | Error::KSumTooSmall { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by model fitting, data handling and experiment runs.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration value (bad sizes, grids, flags, config files).
    #[error("config error: {0}")]
    Config(String),

    /// Problem with an input dataset or a results file.
    #[error("data error: {0}")]
    Data(String),

    /// Label symbols could not be mapped onto the numeric encoding.
    #[error("encoding error: {0}")]
    Encoding(String),

    /// Operands have incompatible dimensions.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A numeric input lies outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// The regularized normal matrix is singular; the least squares fit
    /// has no unique solution under the given configuration.
    #[error("rank deficiency: {0}")]
    RankDeficient(String),

    /// An internal invariant was violated (e.g. a non-monotone descent trace).
    #[error("internal error: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable coarse category, used by the CLI to pick an exit code.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config(_) => ErrorCategory::Config,
            Error::Data(_) | Error::Encoding(_) | Error::Io(_) => ErrorCategory::Data,
            Error::Shape(_)
            | Error::Domain(_)
            | Error::RankDeficient(_)
            | Error::Internal(_) => ErrorCategory::Numerical,
        }
    }
}

/// Coarse error category; the CLI maps these to exit codes 2/3/4.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Data,
    Numerical,
}

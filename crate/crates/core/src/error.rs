use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated an operation's contract (bad argument combination,
    /// unsorted input, mismatched stream durations, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// An input is outside the mathematical domain of the operation
    /// (non-positive energy, rho = 0, reflectivity above coupler
    /// transmission, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A model fit could not be evaluated (NaN model output, degenerate
    /// parameterization).
    #[error("fit error: {0}")]
    Fit(String),

    /// A `.ttg` file failed structural validation.
    #[error("ttg format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn fit(msg: impl Into<String>) -> Self {
        Error::Fit(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}

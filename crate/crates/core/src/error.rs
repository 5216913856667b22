use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the lattice and counting engines.
///
/// The variants are grouped so that front ends can map them onto distinct
/// exit codes: malformed input, unsupported cases, enumeration limits and
/// internal invariant violations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0}")]
    InvalidInput(String),

    #[error("degenerate lattice")]
    DegenerateLattice,

    #[error("even lattice required")]
    OddLattice,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("finite group too large: {size} elements exceeds cap {cap}")]
    CapExceeded { size: String, cap: u64 },

    #[error("invariant violation: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}

use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the domain an operation is defined on.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// An integer argument exceeds a table or precision limit.
    #[error("range error in {op}: {msg}")]
    Range { op: &'static str, msg: String },

    /// A parameter falls in a regime a formula is not valid for.
    #[error("regime error in {op}: {msg}")]
    Regime { op: &'static str, msg: String },

    /// An iterative numeric procedure failed to reach its tolerance.
    #[error("numerics error in {op}: {msg}")]
    Numerics { op: &'static str, msg: String },

    /// A truncation-based convergence decision could not be reached.
    #[error("inconclusive in {op}: {msg}")]
    Inconclusive { op: &'static str, msg: String },
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }

    pub(crate) fn range(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Range { op, msg: msg.into() }
    }

    pub(crate) fn regime(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Regime { op, msg: msg.into() }
    }

    pub(crate) fn numerics(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Numerics { op, msg: msg.into() }
    }

    pub(crate) fn inconclusive(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Inconclusive { op, msg: msg.into() }
    }
}

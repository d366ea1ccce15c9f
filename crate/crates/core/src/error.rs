use thiserror::Error;

/// Errors raised while building or analysing a team formation model.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    Model(String),

    #[error("payoff configuration: {0}")]
    Payoff(String),

    #[error("capacity guard exceeded: {what} (limit {limit}, got {actual})")]
    Capacity {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("schema: {0}")]
    Schema(String),
}

impl Error {
    pub(crate) fn model(msg: impl Into<String>) -> Self {
        Error::Model(msg.into())
    }

    pub(crate) fn payoff(msg: impl Into<String>) -> Self {
        Error::Payoff(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for errors caused by a size guard rather than by bad input.
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_capacity(what: &'static str, limit: usize, actual: usize) -> Result<()> {
    if actual > limit {
        Err(Error::Capacity {
            what,
            limit,
            actual,
        })
    } else {
        Ok(())
    }
}

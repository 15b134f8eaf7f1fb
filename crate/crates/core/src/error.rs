use thiserror::Error;

/// Errors raised while building models or running estimators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("invalid error relation matrix: {}", .0.join("; "))]
    InvalidErm(Vec<String>),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("format error at {path}: {message}")]
    Format { path: String, message: String },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    /// True for errors caused by malformed or inconsistent input.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::UnknownEvent(_)
                | Error::UnknownState(_)
                | Error::Duplicate { .. }
                | Error::Invalid(_)
                | Error::InvalidErm(_)
                | Error::Format { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors raised by the analysis modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid length: {0}")]
    InvalidLength(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("degenerate class {class}: {count} sample(s), at least 2 required")]
    DegenerateClass { class: usize, count: usize },
    #[error("no discrimination: between-class scatter is zero at every bin")]
    NoDiscrimination,
    #[error("insufficient candidates: {0} given, at least 3 required")]
    InsufficientCandidates(usize),
    #[error("layer kind error: {0}")]
    Kind(String),
    #[error("leakage guard: {0}")]
    Leakage(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Broad category used by front ends to choose an exit status.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidLength(_)
            | Error::Parameter(_)
            | Error::InsufficientCandidates(_)
            | Error::Leakage(_) => ErrorCategory::Usage,
            Error::Shape(_)
            | Error::Format(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::DegenerateClass { .. } => ErrorCategory::Data,
            Error::NoDiscrimination | Error::Kind(_) => ErrorCategory::Domain,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Usage,
    Data,
    Domain,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

pub(crate) fn shape(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}

use thiserror::Error;

/// Errors raised across parsing, construction, run search and saturation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("infinite term: {0}")]
    InfiniteTerm(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("invalid run at {location}: {message}")]
    InvalidRun { location: String, message: String },

    #[error("no accepting run")]
    NoRun,

    #[error("no run within budget ({0} configurations explored)")]
    Budget(usize),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("resource exceeded: {0}")]
    ResourceExceeded(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Coarse class used for diagnostics: `parse`, `shape`, `no-run` or
    /// `resource`.
    pub fn class(&self) -> &'static str {
        match self {
            Error::Syntax { .. } | Error::UnknownProposition(_) | Error::Format { .. } => "parse",
            Error::Shape(_)
            | Error::InfiniteTerm(_)
            | Error::AlphabetMismatch(_)
            | Error::InvalidRun { .. }
            | Error::Unsupported(_) => "shape",
            Error::NoRun => "no-run",
            Error::Budget(_) | Error::ResourceExceeded(_) => "resource",
        }
    }

    pub(crate) fn syntax(offset: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn invalid_run(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidRun {
            location: location.into(),
            message: message.into(),
        }
    }
}

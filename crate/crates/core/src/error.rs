use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by every module of the crate.
///
/// The variants map one-to-one onto the CLI exit-code classes: everything
/// except [`Error::Capability`] is a validation-class failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A state or ensemble invariant failed; `invariant` names which one.
    #[error("validation error [{invariant}]: {detail}")]
    Validation {
        invariant: &'static str,
        detail: String,
    },

    /// The request is well-formed but outside what the numerics support
    /// (measured dimension too large, EOF not exact for these dims, ...).
    #[error("capability error: {0}")]
    Capability(String),

    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },

    /// A state or spec file parsed as JSON but a field has the wrong shape.
    #[error("parse error in field `{field}`: {msg}")]
    Format { field: String, msg: String },

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn validation(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Validation {
            invariant,
            detail: detail.into(),
        }
    }

    pub(crate) fn dim(detail: impl Into<String>) -> Self {
        Error::Dimension(detail.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        }
    }
}

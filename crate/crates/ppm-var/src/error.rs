//! Error type shared across the crate.
//!
//! The variants map onto the CLI exit codes: domain/usage problems exit
//! with 1, data problems with 2 and numeric failures with 3.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation was called with inconsistent arguments or configuration.
    #[error("usage error: {0}")]
    Usage(String),

    /// An input file could not be read or parsed.
    #[error("data error{}: {msg}", location(.path, .row))]
    Data {
        path: String,
        /// 1-based row in the input file, when attributable.
        row: Option<usize>,
        msg: String,
    },

    /// A numeric computation produced non-finite or invalid values.
    #[error("numeric error in {context}: {msg}")]
    Numeric { context: String, msg: String },
}

fn location(path: &str, row: &Option<usize>) -> String {
    match row {
        Some(r) => format!(" at {path}:{r}"),
        None if path.is_empty() => String::new(),
        None => format!(" at {path}"),
    }
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn data(path: impl Into<String>, row: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Data {
            path: path.into(),
            row,
            msg: msg.into(),
        }
    }

    pub fn numeric(context: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Numeric {
            context: context.into(),
            msg: msg.into(),
        }
    }

    /// Process exit code associated with this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Usage(_) => 1,
            Error::Data { .. } => 2,
            Error::Numeric { .. } => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Data {
            path: String::new(),
            row: None,
            msg: e.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Shapes, lengths or modes that do not line up.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A value outside the accepted range (non-positive radius, bad count, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Operation only defined for a different node count.
    #[error("unsupported dimension: {operation} needs n = {expected}, got n = {found}")]
    UnsupportedDimension {
        operation: &'static str,
        expected: usize,
        found: usize,
    },

    /// Config error; `line` is 1-based, 0 when no single line is at fault.
    #[error("{}", located(*line, message))]
    Parse { line: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn located(line: usize, message: &str) -> String {
    if line == 0 {
        message.to_string()
    } else {
        format!("line {line}: {message}")
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

use crate::LensIndex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config syntax error at line {line}, column {column}: {msg}")]
    ConfigSyntax { line: usize, column: usize, msg: String },

    #[error("config error in `{field}`: {constraint}")]
    Config { field: String, constraint: String },

    #[error("invalid parameter `{name}`: {constraint}")]
    Domain { name: &'static str, constraint: String },

    #[error("lens {lens} cannot be addressed: {reason}")]
    Addressing { lens: LensIndex, reason: String },

    #[error("model validity: {0}")]
    ModelValidity(String),

    #[error("pulse sequence: {0}")]
    Sequence(String),

    #[error("modulator timing: {0}")]
    Timing(String),

    #[error("empty selection: {0}")]
    EmptySelection(String),

    #[error("image size {width}x{height} exceeds format limits")]
    Size { width: usize, height: usize },

    #[error("malformed PGM: {0}")]
    Format(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(name: &'static str, constraint: impl Into<String>) -> Self {
        Error::Domain { name, constraint: constraint.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code: 2 config, 3 physics validity, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConfigSyntax { .. } | Error::Config { .. } | Error::EmptySelection(_) => 2,
            Error::Io { .. } | Error::Format(_) | Error::Size { .. } => 4,
            Error::Domain { .. }
            | Error::Addressing { .. }
            | Error::ModelValidity(_)
            | Error::Sequence(_)
            | Error::Timing(_) => 3,
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the simulator, trainers and game-solving code.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid configuration `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("invalid action for {agent}: {reason}")]
    Decode { agent: String, reason: String },

    #[error("shape mismatch in layer `{layer}`: {reason}")]
    Shape { layer: String, reason: String },

    #[error("checksum mismatch in {path}: expected {expected}, found {found}")]
    Checksum {
        path: PathBuf,
        expected: String,
        found: String,
    },

    #[error("corrupt checkpoint {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// An internal bookkeeping identity failed beyond tolerance.
    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {reason}")]
    Parse { path: PathBuf, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag, used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Contract(_) => "contract",
            Error::Config { .. } => "config",
            Error::Decode { .. } => "decode",
            Error::Shape { .. } => "shape",
            Error::Checksum { .. } => "checksum",
            Error::Corrupt { .. } => "corrupt",
            Error::NonFinite(_) => "non_finite",
            Error::Internal(_) => "internal",
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
        }
    }
}

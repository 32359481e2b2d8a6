use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    /// Help or version text; not a failure.
    #[error("{0}")]
    Info(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("incompatible reports: {0}")]
    Incompatible(String),
    #[error("golden mismatch: {0}")]
    Mismatch(String),
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const NUMERIC: i32 = 3;
    pub const IO: i32 = 4;
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Info(_) => exit::OK,
            Self::Usage(_) => exit::USAGE,
            Self::Numeric(_) | Self::Incompatible(_) | Self::Mismatch(_) => exit::NUMERIC,
            Self::Io { .. } => exit::IO,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }
}

/// Range and shape problems are the caller's; everything else is numeric.
impl From<loewner_core::Error> for LabError {
    fn from(e: loewner_core::Error) -> Self {
        use loewner_core::Error as E;
        match e {
            E::InvalidArgument(_) | E::OrderTooLarge { .. } | E::OrderMismatch { .. } | E::InsufficientOrder { .. } => {
                Self::Usage(e.to_string())
            }
            _ => Self::Numeric(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;

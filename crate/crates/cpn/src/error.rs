use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CpnError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {msg}", path.display())]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("{}: instance {index}: {source}", path.display())]
    Instance {
        path: PathBuf,
        index: usize,
        #[source]
        source: cpn_core::Error,
    },
    #[error("{}: {msg}", path.display())]
    Format { path: PathBuf, msg: String },
    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },
    #[error(transparent)]
    Core(#[from] cpn_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl CpnError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CpnError::Io { path: path.into(), source }
    }

    pub fn format(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        CpnError::Format { path: path.into(), msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, CpnError>;

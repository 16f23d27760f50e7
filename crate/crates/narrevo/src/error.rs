use std::io;
use std::path::{Path, PathBuf};

use narrevo_core::{ParamError, SimError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid `{key}`: {message}")]
    Invalid { key: String, message: String },

    #[error("{cell}: {source}")]
    Cell {
        cell: String,
        #[source]
        source: Box<ConfigError>,
    },
}

impl ConfigError {
    pub(crate) fn parse(path: &Path, e: &serde_json::Error) -> ConfigError {
        ConfigError::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }

    pub(crate) fn invalid(e: ParamError) -> ConfigError {
        ConfigError::Invalid {
            key: e.field().to_string(),
            message: e.to_string(),
        }
    }

    pub(crate) fn in_cell(self, cell: String) -> ConfigError {
        ConfigError::Cell {
            cell,
            source: Box::new(self),
        }
    }

    pub fn is_io(&self) -> bool {
        match self {
            ConfigError::Io { .. } => true,
            ConfigError::Cell { source, .. } => source.is_io(),
            _ => false,
        }
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{cell}, replication {rep}: {source}")]
    Simulation {
        cell: String,
        rep: usize,
        source: SimError,
    },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: io::Error) -> HarnessError {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Process exit code: 2 for I/O failures, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(e) if e.is_io() => 2,
            HarnessError::Io { .. } | HarnessError::Csv { .. } | HarnessError::Json { .. } => 2,
            _ => 1,
        }
    }
}

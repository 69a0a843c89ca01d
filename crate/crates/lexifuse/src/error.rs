use std::path::PathBuf;

use lexifuse_core::Error;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    InFile {
        path: PathBuf,
        #[source]
        source: Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn in_file(path: impl Into<PathBuf>, source: Error) -> Self {
        CliError::InFile {
            path: path.into(),
            source,
        }
    }

    /// 2 usage/configuration, 3 parse/domain, 4 numeric.
    pub fn exit_code(&self) -> i32 {
        let core = match self {
            CliError::Core(e) | CliError::InFile { source: e, .. } => e,
            CliError::Io { .. } | CliError::Usage(_) => return 2,
        };
        match core {
            Error::Parse { .. } | Error::Domain(_) => 3,
            Error::Numeric(_) => 4,
            Error::Config(_) | Error::Usage(_) => 2,
        }
    }

    pub fn category(&self) -> &'static str {
        match self.exit_code() {
            3 => "parse",
            4 => "numeric",
            _ => "usage",
        }
    }
}

use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {msg}", path.display())]
    Format { path: PathBuf, msg: String },

    #[error("manifest {}: {msg}", path.display())]
    Manifest { path: PathBuf, msg: String },

    #[error("config: {0}")]
    Config(String),

    #[error("{0}")]
    MissingRole(String),

    #[error("registry validation failed:\n{0}")]
    InvalidRegistry(String),

    #[error(transparent)]
    Core(#[from] clinrel_core::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// 1 for domain failures (missing data roles, numerical preconditions),
    /// 2 for I/O, format and configuration failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::MissingRole(_) | Error::InvalidRegistry(_) | Error::Core(_) => 1,
            Error::Io { .. } | Error::Format { .. } | Error::Manifest { .. } | Error::Config(_) | Error::Json(_) => 2,
        }
    }
}

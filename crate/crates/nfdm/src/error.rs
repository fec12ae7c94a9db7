use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad or inconsistent input: config files, plot specs, dumps.
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Numerical(#[from] nfdm_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// Process exit code: 3 for numerical failures, 2 for everything the
    /// user has to fix, unreadable or unwritable files included.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(nfdm_core::Error::Config(_)) => 2,
            Error::Numerical(_) => 3,
            Error::Config(_) | Error::Io { .. } => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

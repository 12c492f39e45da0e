use std::path::PathBuf;

/// Errors raised by the simulator, the agent, and the experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("validation error at row {row}: {message}")]
    Validation { row: usize, message: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("run failed for policy `{policy}`: {message}")]
    Run { policy: String, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 1 for bad input, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Format(_) | Error::Validation { .. } => 1,
            Error::Io { .. } | Error::Run { .. } => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use std::path::PathBuf;

use thiserror::Error;

/// Every failure the toolkit can report.
#[derive(Debug, Error)]
pub enum Error {
    /// A morphology or trajectory does not match the robot it is used with.
    #[error("structural mismatch: {0}")]
    Structural(String),

    /// A request would exceed a configured resource cap.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// The surrogate simulator refused the configuration.
    #[error("simulation error ({tag}): {detail}")]
    Simulation { tag: &'static str, detail: String },

    /// A numerical post-condition was violated, which indicates a bug upstream.
    #[error("integrity violation: {0}")]
    Integrity(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("pipeline error: {0}")]
    Pipeline(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Tag attached to simulation errors for morphologies that cannot stand.
pub const STATICALLY_UNSUPPORTABLE: &str = "statically unsupportable";

pub type Result<T> = std::result::Result<T, Error>;

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the memory, reasoning and simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("network has no clusters")]
    EmptyNetwork,

    #[error("network has no non-storage clusters")]
    NoContextClusters,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("day {day} outside current window [{start}, {end}]")]
    DayOutsideWindow { day: u32, start: u32, end: u32 },

    #[error("unknown context `{0}`")]
    UnknownContext(String),

    #[error("unknown instance `{0}`")]
    UnknownInstance(String),

    #[error("instance `{0}` is already placed in the environment")]
    InstanceAlreadyPresent(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("unsupported state format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("inconsistent state: {0}")]
    Inconsistent(String),

    #[error("failed to parse {what}: {source}")]
    Parse {
        what: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(what: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Parse {
            what: what.into(),
            source,
        }
    }

    /// True for errors caused by the caller's input rather than internal failure.
    pub fn is_client_error(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }
}

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by geometry, simulation, metrology and file handling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid feed: axial feed {feed_mm} mm must be below the tool diameter {d0_mm} mm")]
    InvalidFeed { feed_mm: f64, d0_mm: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("empty envelope: {0}")]
    EmptyEnvelope(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("fit failure: {0}")]
    FitFailure(String),

    #[error("filter length: cutoff {cutoff_um} um needs at least {needed_um} um of trace, got {available_um} um")]
    FilterLength {
        cutoff_um: f64,
        needed_um: f64,
        available_um: f64,
    },

    #[error("no features: {0}")]
    NoFeatures(String),

    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    #[error("undefined anisotropy: all variances are zero")]
    UndefinedAnisotropy,

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("comparison: {0}")]
    Comparison(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    /// True for errors caused by malformed input files or configs.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Config(_) | Error::Io { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

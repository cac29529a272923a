use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("similarity undefined for a zero vector")]
    UndefinedSimilarity,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("insufficient overlap between lexicon and vocabularies ({src}->{tgt}): no pair survives")]
    InsufficientOverlap { src: String, tgt: String },

    #[error("covariance matrix is singular ({0}); use a positive regularization lambda")]
    Singular(String),

    #[error("alignment {src}->{tgt} failed: {source}")]
    Alignment {
        src: String,
        tgt: String,
        #[source]
        source: Box<Error>,
    },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("protocol violation: {0}")]
    Protocol(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }

    /// Whether the error stems from user configuration rather than input data.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_) | Error::Protocol(_) => true,
            Error::Alignment { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

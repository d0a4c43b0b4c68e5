use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image codec error for {path}: {source}")]
    Decode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("unsupported image layout: {0}")]
    UnsupportedImage(String),

    #[error("value {value} at index {index} lies outside the declared range [{lo}, {hi}]")]
    OutOfRange { index: usize, value: f64, lo: f64, hi: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("region {0} is empty or does not exist")]
    EmptyRegion(usize),

    #[error("regions {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("malformed {kind} file: {reason}")]
    Format { kind: &'static str, reason: String },

    #[error("predictor failed: {0}")]
    Predictor(#[source] Box<dyn std::error::Error + Send + Sync>),

    #[error("no readable images in corpus ({skipped} skipped)")]
    EmptyCorpus { skipped: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(kind: &'static str, reason: impl Into<String>) -> Self {
        Error::Format {
            kind,
            reason: reason.into(),
        }
    }
}

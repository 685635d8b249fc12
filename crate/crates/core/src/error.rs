use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = InpaintError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum InpaintError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("rectangle {rect} lies outside a {width}x{height} plane")]
    OutOfBounds {
        rect: String,
        width: usize,
        height: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("need at least {needed} known pixels, found {found}")]
    TooFewKnown { needed: usize, found: usize },

    #[error("duplicate sample coordinate ({0}, {1})")]
    DuplicateCoordinate(f64, f64),

    #[error("{0} system singular")]
    Singular(&'static str),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unsupported bit depth: {0}")]
    UnsupportedBitDepth(String),

    #[error("malformed raster {path}: {reason}")]
    Malformed { path: PathBuf, reason: String },

    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("case {case}: {source}")]
    Case {
        case: String,
        #[source]
        source: Box<InpaintError>,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl InpaintError {
    pub(crate) fn dims(expected: impl Into<String>, found: impl Into<String>) -> Self {
        InpaintError::DimensionMismatch {
            expected: expected.into(),
            found: found.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        InpaintError::InvalidArgument(msg.into())
    }
}

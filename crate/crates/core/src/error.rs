use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("failed to write {path}: {message}")]
    Write { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unsupported pixel format in {path}: {detail}")]
    UnsupportedFormat { path: PathBuf, detail: String },

    #[error("empty image: {0}")]
    EmptyImage(PathBuf),

    #[error("no supported images in directory {0}")]
    EmptyDirectory(PathBuf),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("frame too small: {width}x{height}, need at least {min_width}x{min_height}")]
    FrameTooSmall {
        width: usize,
        height: usize,
        min_width: usize,
        min_height: usize,
    },

    #[error("unsupported channel count {0} (expected 1 or 3)")]
    UnsupportedChannels(usize),

    #[error("invalid frame data: {0}")]
    InvalidFrame(String),

    #[error("no valid gradient pixels")]
    NoValidPixels,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("comparison graph is disconnected: {}", format_components(.0))]
    Disconnected(Vec<Vec<String>>),

    #[error("maximum-likelihood abilities diverge: {0}")]
    Degenerate(String),
}

fn format_components(components: &[Vec<String>]) -> String {
    components
        .iter()
        .map(|c| format!("{{{}}}", c.join(", ")))
        .collect::<Vec<_>>()
        .join(" ")
}

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

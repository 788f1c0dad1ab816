use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{field}: range is inverted (lo = {lo} > hi = {hi})")]
    RangeInverted { field: String, lo: f64, hi: f64 },

    #[error("{field}: brightness factor must be non-negative, got {value}")]
    NegativeFactor { field: String, value: f64 },

    #[error("{field}: probability must lie in [0, 1], got {value}")]
    BadProbability { field: String, value: f64 },

    #[error("{field}: {value} is outside the allowed range {allowed}")]
    OutOfRange {
        field: String,
        value: f64,
        allowed: &'static str,
    },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("{op} needs a {expected}-channel image, got {found} channel(s)")]
    ChannelMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("corrupt file {path}: {reason}")]
    CorruptFile { path: PathBuf, reason: String },

    #[error("unsupported bit depth in {path}: only 8-bit channels are accepted")]
    UnsupportedDepth { path: PathBuf },

    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("no decodable images under {0}")]
    EmptyDataset(PathBuf),

    #[error("invalid manifest: {0}")]
    Manifest(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad parameters rather than by the data or the filesystem.
    pub fn is_parameter_error(&self) -> bool {
        matches!(
            self,
            Error::RangeInverted { .. }
                | Error::NegativeFactor { .. }
                | Error::BadProbability { .. }
                | Error::OutOfRange { .. }
        )
    }
}

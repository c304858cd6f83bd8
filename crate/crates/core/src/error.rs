use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or configuration value is out of its domain.
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    /// A rectangle or image size does not fit the image it is applied to.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// A file did not follow the expected binary or image format.
    #[error("format error in {}: {reason}", path.display())]
    Format { path: PathBuf, reason: String },

    /// The placement step found no non-empty cell around the salient box.
    #[error("no placement cell available around the salient region")]
    NoPlacement,

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("manifest error: {0}")]
    Manifest(String),

    /// A single corpus image failed (raised only in strict mode).
    #[error("image {index} ({source_name}): {reason}")]
    Image {
        index: u64,
        source_name: String,
        reason: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

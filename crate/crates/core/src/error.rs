use std::path::PathBuf;

/// Errors raised across the crate. Variants map onto the failure classes the
/// CLI turns into distinct exit codes.
#[derive(Debug, thiserror::Error)]
pub enum GlideError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("lookup error: {0}")]
    Lookup(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("shape error: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("training error: {0}")]
    Training(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl GlideError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GlideError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = GlideError> = std::result::Result<T, E>;

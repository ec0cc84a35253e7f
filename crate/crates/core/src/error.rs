use std::path::PathBuf;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },

    #[error("line {line}: document '{doc_id}': {invariant}")]
    Invariant {
        line: usize,
        doc_id: String,
        invariant: String,
    },

    #[error("line {line}: duplicate doc_id '{doc_id}'")]
    DuplicateDocId { line: usize, doc_id: String },

    #[error("manifest: {0}")]
    Manifest(String),

    #[error("feature unavailable: {0}")]
    FeatureUnavailable(&'static str),

    #[error("inconsistent feature availability: {0}")]
    InconsistentFeatures(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("feature schema mismatch: expected {expected}, found {found}")]
    SchemaMismatch { expected: String, found: String },

    #[error("cannot fit aggregator: {0}")]
    Unfittable(String),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by invalid input data rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }
}

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    MalformedLine { line: usize, message: String },

    #[error("unknown label '{label}' at line {line}")]
    UnknownLabelAtLine { label: String, line: usize },

    #[error("unknown label '{0}'")]
    UnknownLabel(String),

    #[error("duplicate document id '{0}'")]
    DuplicateId(String),

    #[error("document '{0}' has no label")]
    Unlabeled(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("need at least 2 distinct classes, found {0}")]
    TooFewClasses(usize),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("vector dimensionality {found} does not match model vocabulary size {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("model format version {found} is not supported (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("corrupt model file: {0}")]
    CorruptModel(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

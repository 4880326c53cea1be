use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("document is empty after tokenization")]
    EmptyDocument,

    #[error("cannot read {path}: {source}")]
    Load {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("{path}:{line}: {message}")]
    Schema {
        path: String,
        line: usize,
        message: String,
    },

    #[error("value outside domain: {0}")]
    Domain(String),

    #[error("tree syntax error at offset {offset}: {message}")]
    TreeSyntax { offset: usize, message: String },

    #[error("pattern syntax error at position {position}: {message}")]
    PatternSyntax { position: usize, message: String },

    #[error("annotation mismatch: {0}")]
    AnnotationMismatch(String),

    #[error("singular design; offending features: {}", .features.join(", "))]
    SingularDesign { features: Vec<String> },

    #[error("missing feature(s): {}", .features.join(", "))]
    MissingFeature { features: Vec<String> },

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("BIC undefined for a zero residual sum of squares")]
    BicUndefined,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("model was trained against registry {expected}, got {actual}")]
    RegistryMismatch { expected: String, actual: String },

    #[error("document {id}: {source}")]
    InDocument {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn in_document(id: impl Into<String>, source: Error) -> Self {
        Error::InDocument {
            id: id.into(),
            source: Box::new(source),
        }
    }

    /// The innermost error, past any document context.
    pub fn root(&self) -> &Error {
        match self {
            Error::InDocument { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn load(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Load {
            path: path.into(),
            source,
        }
    }
}

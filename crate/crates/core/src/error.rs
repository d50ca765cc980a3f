use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("DuplicateId: document id `{0}` appears more than once")]
    DuplicateId(String),

    #[error("ParseError: {source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("MultiLabelUnsupported: document `{0}` carries more than one label")]
    MultiLabelUnsupported(String),

    #[error("MissingLabel: document `{0}` has no label")]
    MissingLabel(String),

    #[error("InvalidFraction: test fraction {0} is outside [0, 1)")]
    InvalidFraction(f64),

    #[error("EmptyCorpus: operation requires at least one document")]
    EmptyCorpus,

    #[error("DimensionMismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("ZeroFrequencyFeature: feature #{0} has a zero corpus total")]
    ZeroFrequencyFeature(usize),

    #[error("IndexOutOfRange: {what} index {index} is not below {len}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("DegenerateLabels: binary training needs both +1 and -1 patterns")]
    DegenerateLabels,

    #[error("EmptyTrainingSet: no training patterns")]
    EmptyTrainingSet,

    #[error("NotEnoughClasses: need at least 2 classes, found {0}")]
    NotEnoughClasses(usize),

    #[error("EmptyClass: class `{0}` has no training documents")]
    EmptyClass(String),

    #[error("UnknownClass: label `{0}` is not a class of the model")]
    UnknownClass(String),

    #[error("InvalidHyperparameter: {0}")]
    InvalidHyperparameter(String),

    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),

    #[error("InvalidModel: {0}")]
    InvalidModel(String),

    #[error("UnsupportedModelVersion: `{0}`")]
    UnsupportedModelVersion(String),

    #[error("Io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("Json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(source_name: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            message: message.into(),
        }
    }

    /// Short error name, as printed by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DuplicateId(_) => "DuplicateId",
            Error::Parse { .. } => "ParseError",
            Error::MultiLabelUnsupported(_) => "MultiLabelUnsupported",
            Error::MissingLabel(_) => "MissingLabel",
            Error::InvalidFraction(_) => "InvalidFraction",
            Error::EmptyCorpus => "EmptyCorpus",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::ZeroFrequencyFeature(_) => "ZeroFrequencyFeature",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::DegenerateLabels => "DegenerateLabels",
            Error::EmptyTrainingSet => "EmptyTrainingSet",
            Error::NotEnoughClasses(_) => "NotEnoughClasses",
            Error::EmptyClass(_) => "EmptyClass",
            Error::UnknownClass(_) => "UnknownClass",
            Error::InvalidHyperparameter(_) => "InvalidHyperparameter",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::InvalidModel(_) => "InvalidModel",
            Error::UnsupportedModelVersion(_) => "UnsupportedModelVersion",
            Error::Io { .. } => "IoError",
            Error::Json(_) => "ParseError",
        }
    }

    /// Errors that can only arise from a broken internal invariant rather
    /// than from bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::ZeroFrequencyFeature(_) | Error::DimensionMismatch { .. } | Error::IndexOutOfRange { .. }
        )
    }
}

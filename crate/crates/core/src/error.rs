use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset has no instances")]
    EmptyDataset,

    #[error("malformed dataset: {0}")]
    Malformed(String),

    #[error("numeric feature {feature} has no observed values")]
    AllMissing { feature: usize },

    #[error("missing values in numeric feature {feature} are not supported")]
    UnsupportedMissing { feature: usize },

    #[error("class {class} has no observed values for feature {feature}")]
    DegenerateStatistics { feature: usize, class: usize },

    #[error("feature {feature} is {found}, expected {expected}")]
    KindMismatch {
        feature: usize,
        expected: &'static str,
        found: &'static str,
    },

    #[error("missing value passed where a known value is required")]
    MissingValue,

    #[error("range statistics not computed for feature {feature}")]
    StatsNotComputed { feature: usize },

    #[error("index {index} out of bounds (len {len})")]
    OutOfBounds { index: usize, len: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("at least two classes are required, found {found}")]
    TooFewClasses { found: usize },

    #[error("relief only handles two-class problems, found {found} classes")]
    NotTwoClass { found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{0}")]
    EmptyInput(&'static str),

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

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

pub type Result<T, E = Error> = std::result::Result<T, E>;

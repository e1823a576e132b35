use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OpfError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}, column '{column}': cannot parse '{value}' as a number")]
    NonNumeric { row: usize, column: String, value: String },

    #[error("label column '{0}' not found in header")]
    UnknownLabelColumn(String),

    #[error("label column must hold exactly 2 distinct values, found {found}: {values:?}")]
    LabelCount { found: usize, values: Vec<String> },

    #[error("feature column '{0}' has no non-missing values")]
    AllMissing(String),

    #[error("dataset contains missing values; impute them first")]
    MissingValues,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("both classes are required, {0}")]
    SingleClass(String),

    #[error("k = {k} out of range 1..={max}")]
    KOutOfRange { k: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("minority class has {0} sample(s), at least 2 are required")]
    MinorityTooSmall(usize),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("unknown method '{0}'")]
    UnknownMethod(String),

    #[error("run {run}, method {method}: {source}")]
    RunFailed {
        run: usize,
        method: String,
        #[source]
        source: Box<OpfError>,
    },

    #[error("report serialization failed: {0}")]
    Report(String),
}

pub type Result<T> = std::result::Result<T, OpfError>;

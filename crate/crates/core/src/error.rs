use std::path::PathBuf;

/// Errors produced anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: expected {expected} columns, found {found}")]
    ColumnCount {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("dataset has {0} distinct label(s), at least 2 are required")]
    TooFewClasses(usize),

    #[error("class {class} has a single member, cannot stratify")]
    SingletonClass { class: usize },

    #[error("class {class} is absent from the training set")]
    MissingClass { class: usize },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("non-finite feature value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("requested {requested} samples but only {available} are available")]
    BudgetExceedsPool { requested: usize, available: usize },

    #[error("nearest-neighbor distance undefined: anchor set is empty")]
    EmptyAnchors,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fit failed for candidate {candidate} with assumed label {label}: {source}")]
    RimFit {
        candidate: usize,
        label: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("selection step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("selection invariant violated: {0}")]
    Invariant(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

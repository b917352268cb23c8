use std::fmt;
use std::path::PathBuf;

/// Pipeline stage in which a per-record failure occurred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    CoarseCfo,
    FineCfo,
    ChannelEstimate,
    Equalize,
    Features,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::CoarseCfo => "coarse-cfo",
            Stage::FineCfo => "fine-cfo",
            Stage::ChannelEstimate => "channel-estimate",
            Stage::Equalize => "equalize",
            Stage::Features => "features",
        };
        f.write_str(name)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed record: expected {expected} samples, found {found}")]
    MalformedRecord { expected: usize, found: usize },

    #[error("malformed record: empty device label")]
    EmptyLabel,

    #[error("non-finite sample at index {index}")]
    NonFiniteSample { index: usize },

    #[error("degenerate signal in {stage}: correlation or distance sum is zero")]
    DegenerateSignal { stage: Stage },

    #[error("singular channel at subcarrier position {bin} (|h| below 1e-12)")]
    SingularChannel { bin: usize },

    #[error("I/Q gain imbalance undefined: quadrature energy is zero")]
    UndefinedImbalance,

    #[error("device {label}: {stage} failed: {source}")]
    Record {
        label: String,
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error("empty input sequence")]
    EmptySequence,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate training set: {0}")]
    DegenerateTraining(String),

    #[error("feature count mismatch: expected {expected}, found {found}")]
    FeatureCount { expected: usize, found: usize },

    #[error("class {class:?} has {count} samples, fewer than {folds} folds")]
    Stratification {
        class: String,
        count: usize,
        folds: usize,
    },

    #[error("smoothing failed for device {label}, feature {feature}: {source}")]
    Smoothing {
        label: String,
        feature: String,
        #[source]
        source: Box<Error>,
    },

    #[error("duplicate device label {0:?}")]
    DuplicateLabel(String),

    #[error("row {row}: {kind}")]
    Row { row: u64, kind: RowErrorKind },

    #[error("missing column {0:?}")]
    MissingColumn(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("unsupported model format version {0}")]
    ModelVersion(u32),
}

/// What went wrong with a single CSV row.
#[derive(Debug, Clone, PartialEq)]
pub enum RowErrorKind {
    WrongSampleCount { column: String, expected: usize, found: usize },
    BadComplexLiteral { column: String, literal: String },
    BadNumber { column: String, literal: String },
    MissingValue { column: String },
    EmptyLabel,
    FieldCount { expected: usize, found: usize },
    Csv(String),
}

impl fmt::Display for RowErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowErrorKind::WrongSampleCount {
                column,
                expected,
                found,
            } => write!(f, "column {column}: expected {expected} samples, found {found}"),
            RowErrorKind::BadComplexLiteral { column, literal } => {
                write!(f, "column {column}: unparseable complex literal {literal:?}")
            }
            RowErrorKind::BadNumber { column, literal } => {
                write!(f, "column {column}: unparseable number {literal:?}")
            }
            RowErrorKind::MissingValue { column } => write!(f, "column {column}: missing value"),
            RowErrorKind::EmptyLabel => f.write_str("empty device label"),
            RowErrorKind::FieldCount { expected, found } => {
                write!(f, "expected {expected} fields, found {found}")
            }
            RowErrorKind::Csv(msg) => write!(f, "csv: {msg}"),
        }
    }
}

impl Error {
    pub(crate) fn at_stage(self, label: &str, stage: Stage) -> Error {
        Error::Record {
            label: label.to_string(),
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

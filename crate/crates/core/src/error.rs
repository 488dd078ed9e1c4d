use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unmapped emotion category `{0}`")]
    UnmappedCategory(String),

    #[error("cutoff {cutoff} Hz must lie in (0, {nyquist}) Hz")]
    CutoffOutOfRange { cutoff: f64, nyquist: f64 },

    #[error("signal of {len} samples is too short (need more than {min})")]
    SignalTooShort { len: usize, min: usize },

    #[error("segment of {len} samples is shorter than the {window}-sample window")]
    SegmentShorterThanWindow { len: usize, window: usize },

    #[error("segment rejected by quality gate: {0:?}")]
    QualityRejected(crate::preprocess::QualityReason),

    #[error("dataset contains a single label class")]
    SingleClass,

    #[error("missing value for feature `{0}`")]
    MissingFeature(String),

    #[error("empty dataset: {0}")]
    EmptyDataset(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("missing input {path}: {reason}")]
    MissingInput { path: PathBuf, reason: String },

    #[error("artifact config hash mismatch: {0}")]
    HashMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI; each failure class has its own.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 3,
            Error::MissingInput { .. } => 4,
            Error::Parse { .. }
            | Error::Validation(_)
            | Error::UnmappedCategory(_)
            | Error::MissingFeature(_)
            | Error::CutoffOutOfRange { .. }
            | Error::SignalTooShort { .. }
            | Error::SegmentShorterThanWindow { .. }
            | Error::QualityRejected(_)
            | Error::Json(_) => 5,
            Error::EmptyDataset(_) | Error::SingleClass => 6,
            Error::HashMismatch(_) => 7,
            Error::Io(_) => 8,
        }
    }

    /// Stable machine-readable name of the failure class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Validation(_) => "validation",
            Error::UnmappedCategory(_) => "unmapped_category",
            Error::CutoffOutOfRange { .. } => "cutoff_out_of_range",
            Error::SignalTooShort { .. } => "signal_too_short",
            Error::SegmentShorterThanWindow { .. } => "segment_shorter_than_window",
            Error::QualityRejected(_) => "quality_rejected",
            Error::SingleClass => "single_class",
            Error::MissingFeature(_) => "missing_feature",
            Error::EmptyDataset(_) => "empty_dataset",
            Error::Config(_) => "config",
            Error::MissingInput { .. } => "missing_input",
            Error::HashMismatch(_) => "hash_mismatch",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn parse(row: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            row,
            message: message.into(),
        }
    }
}

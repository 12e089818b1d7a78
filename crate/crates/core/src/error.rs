use thiserror::Error;

/// Errors produced by parsing, alignment and dataset construction.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("parse error ({context}): {message}")]
    Parse { context: String, message: String },

    #[error("unified record {index}: {message}")]
    Record { index: usize, message: String },

    #[error(
        "ambiguous overlap: normalized text of {doc_id} matches multiple partners: {candidates:?}"
    )]
    AmbiguousOverlap {
        doc_id: String,
        candidates: Vec<String>,
    },

    #[error("co-occurrence score undefined: zero denominator for ({arg1}, {arg2})")]
    UndefinedScore { arg1: String, arg2: String },

    #[error("soft label needs at least 2 classes, got {0}")]
    TooFewClasses(usize),

    #[error("distribution dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("cannot subsample {requested} from {available} examples")]
    CapTooLarge { requested: usize, available: usize },

    #[error("{0}")]
    InvalidInput(String),

    #[error("empty result list")]
    EmptyInput,
}

impl CoreError {
    pub fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        CoreError::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}

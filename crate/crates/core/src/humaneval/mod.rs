//! Human evaluation scoring: SQM ratings, MQM error annotation over the core
//! tagset, and inter-annotator agreement.

mod agreement;
mod kappa;
mod records;
mod scoring;
mod taxonomy;

use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub use agreement::{agreement_report, count_at_least_fair, AgreementReport, AgreementRow};
pub use kappa::{cohen_kappa, kappa_band, KappaBand, KappaResult};
pub use records::{load_annotations, parse_annotations, AnnotationRecord, MqmError, SqmRating};
pub use scoring::{mqm_error_counts, mqm_weighted_score, sqm_mean, CountTable, GroupBy, MqmScore};
pub use taxonomy::{
    Dimension, MqmCategory, Severity, MAJOR_WEIGHT, MINOR_WEIGHT, NON_TRANSLATION_WEIGHT,
};

#[derive(Debug, Error)]
pub enum HumanEvalError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("line {line}: unknown MQM category `{category}`")]
    UnknownCategory { line: usize, category: String },
    #[error("line {line}: SQM rating {value} outside 0..=6")]
    SqmOutOfRange { line: usize, value: i64 },
    #[error("line {line}: duplicate record for segment `{segment_id}`, annotator `{annotator_id}`, system `{system_id}`")]
    DuplicateKey {
        line: usize,
        segment_id: String,
        annotator_id: String,
        system_id: String,
    },
    #[error("no records for system `{system_id}` in direction `{direction}`")]
    NoMatchingRecords {
        system_id: String,
        direction: String,
    },
    #[error("label lists differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("no labels to compare")]
    EmptyInput,
    #[error("agreement needs exactly two annotators, found {}: {}", found.len(), found.join(", "))]
    AnnotatorCountNotTwo { found: Vec<String> },
    #[error("segment `{segment_id}` was not rated by annotator `{annotator_id}`")]
    UnpairedSegment {
        segment_id: String,
        annotator_id: String,
    },
}

pub type Result<T, E = HumanEvalError> = std::result::Result<T, E>;

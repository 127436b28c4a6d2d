//! Accuracy, confusion matrices, bootstrap intervals, correlations and reports.

mod bootstrap;
mod confusion;
mod correlation;
mod quality;
mod report;

pub use bootstrap::{bootstrap_accuracy, BootstrapCI, DEFAULT_RESAMPLES};
pub use confusion::{
    aggregate_matrices, aggregate_matrices_with, confusion, ConfusionMatrix, Weighting,
};
pub use correlation::{pearson, pearson_labeled, CorrelationReport};
pub use quality::{quality_stats, EvidenceQualityStats};
pub use report::{
    cell_slug, emit_report, load_scatter, scatter_correlations, summarize, ExperimentResult,
    FailureCounts, ScatterRow,
};

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{left} outcomes but {right} gold labels")]
    LengthMismatch { left: usize, right: usize },
    #[error("nothing to evaluate")]
    EmptyEvaluation,
    #[error("empty list of matrices")]
    EmptyList,
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("a coordinate has zero variance")]
    DegenerateVariance,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Malformed { path: PathBuf, message: String },
}

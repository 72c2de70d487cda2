//! Scoring of extraction runs: review sheets, the per-category
//! performance matrix, inter-rater agreement and the unmapped-item report.

mod kappa;
mod metrics;
mod review;
mod unmapped;

use thiserror::Error;

pub use kappa::{weighted_kappa, KappaError, Weights};
pub use metrics::{score_reviews, CategoryMetrics, CountShare, MetricsReport};
pub use review::{
    align_labels, init_review_sheet, parse_review_sheet, read_review_sheet, write_review_sheet,
    ItemIndex, ReviewLabel, ReviewRow, REVIEW_HEADER,
};
pub use unmapped::{unmapped_report, UnmappedCategory, UnmappedReport};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("review sheet: {0}")]
    Csv(#[from] csv::Error),
    #[error("review sheet header must be `{expected}`, found `{found}`")]
    BadHeader { expected: String, found: String },
    #[error("row {row}: unknown category {value:?}")]
    UnknownCategory { row: usize, value: String },
    #[error("row {row}: invalid {field} {value:?}")]
    BadField {
        row: usize,
        field: &'static str,
        value: String,
    },
    #[error("row {row} ({post_id}/{item_index}) has no label")]
    Unlabeled {
        row: usize,
        post_id: String,
        item_index: String,
    },
    #[error("row {row}: {reason}")]
    Invariant { row: usize, reason: String },
    #[error("review sheets are not aligned: {0}")]
    Misaligned(String),
    #[error(transparent)]
    Kappa(#[from] KappaError),
}

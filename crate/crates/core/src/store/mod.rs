//! Filesystem ingestion and persistence: image batches with annotation
//! sidecars, human ground-truth CSVs and the append-only audit history.

mod batch;
mod ground_truth;
mod history;

pub use batch::{scan_batch, BatchEntry, ImageBatch, TimestampSource, ANNOTATIONS_FILE};
pub use ground_truth::{load_ground_truth, GroundTruthRow, GroundTruthSet};
pub use history::{CorruptionReport, HistoryStore};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("csv error in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
}

impl StoreError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> StoreError {
        StoreError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

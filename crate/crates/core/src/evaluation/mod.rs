//! Listening-test statistics, report rendering and test-set manifests.

mod manifest;
mod mos;
mod ratings;

use thiserror::Error;

use crate::analysis::AnalysisError;

pub use manifest::{
    load_manifest, parse_manifest, select_subset, Gender, Manifest, ManifestEntry, ManifestFilter,
    ManifestTotals,
};
pub use mos::{
    aggregate_report, load_embedding_pairs, mos_with_ci, parse_embedding_pairs, EmbeddingPair,
    MosCell, MosReport, Pooling, ReportRow,
};
pub use ratings::{load_ratings, parse_ratings, Dimension, ListenerGroup, RatingRecord};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },
    #[error("line {line}, field '{field}': {reason}")]
    Field {
        line: u64,
        field: &'static str,
        reason: String,
    },
    #[error("header mismatch: expected '{expected}', found '{found}'")]
    Header { expected: String, found: String },
    #[error("no scores to aggregate")]
    EmptyScores,
    #[error("score {0} outside 1..=5")]
    ScoreOutOfRange(u8),
    #[error("missing ratings for {}", format_gaps(.0))]
    MissingCells(Vec<(String, Dimension)>),
    #[error("embedding pair line {line}: {source}")]
    Embedding {
        line: usize,
        #[source]
        source: AnalysisError,
    },
}

fn format_gaps(gaps: &[(String, Dimension)]) -> String {
    gaps.iter()
        .map(|(s, d)| format!("({s}, {d})"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl EvalError {
    pub fn is_io(&self) -> bool {
        match self {
            EvalError::Io { .. } => true,
            EvalError::Embedding { source, .. } => source.is_io(),
            _ => false,
        }
    }
}

pub(crate) fn read_text(path: &std::path::Path) -> Result<String, EvalError> {
    std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.display().to_string(),
        source,
    })
}

//! Relevance distances between clicks and the layered pre-space.

mod bm25;
mod corpus;
mod distance;
mod prespace;

pub use bm25::{bm25_score, idf, Bm25Params};
pub use corpus::CorpusStats;
pub use distance::{click_distance, DistanceMethod, DistanceModel, PreparedClick};
pub use prespace::{build_prespace, Layer, LayeredPreSpace, PointId, ThreadEdge};

#[derive(Debug, thiserror::Error)]
pub enum MetricError {
    #[error("document {0:?} is not in the corpus statistics")]
    UnknownDocument(String),
    #[error("invalid corpus statistics: {0}")]
    InvalidCorpus(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

//! Nearest-neighbour skeleton, simplex cells and the layer-by-layer
//! embedding into `n + 1` dimensions.

mod embed;
mod graph;
pub mod mds;
pub mod procrustes;

pub use embed::{embed_layers, EmbedOptions, EmbeddedPoint, EmbeddedSpace, LayerReport, Thread};
pub use graph::{default_k, form_simplices, link_nearest_neighbors, KnnEdge, Skeleton};
pub use procrustes::{procrustes_residual, rigid_align, rms_distance, RigidTransform};

#[derive(Debug, thiserror::Error)]
pub enum SkeletonError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

//! Surface roughness and environment comparison.

mod compare;
mod roughness;

pub use compare::{compare_environments, discrete_frechet, ComparisonReport, PairDeviation, Summary};
pub use roughness::{
    distortion_field, roughness, smoothing_delta, write_distortion_csv, JumpStats, RoughnessOptions,
    RoughnessReport, SmoothingDelta,
};

#[derive(Debug, thiserror::Error)]
pub enum DiagnosticsError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("reports are not comparable: {0}")]
    NotComparable(String),
    #[error("unknown thread {0:?}")]
    UnknownThread(String),
    #[error("correspondence is empty")]
    EmptyCorrespondence,
    #[error("no corresponding pair has at least 2 points")]
    NoUsablePairs,
    #[error("malformed report: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `key = value` lines in the given order.
pub(crate) fn key_values(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

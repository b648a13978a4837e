//! File-per-stage pipeline driven by a TOML configuration.
//!
//! Every stage reads its inputs from earlier stage directories under the
//! output directory, writes its outputs to `<output_dir>/<stage>/` and
//! records a `manifest.json` with the configuration hash, input hashes and
//! tool version. A stage whose manifest still matches is skipped.

mod config;
mod stages;
mod store;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

pub use config::{
    CompareConfig, DiagnoseConfig, DistanceConfig, GeodesicConfig, InputConfig, PipelineConfig, SessionConfig,
    SkeletonConfig,
};
pub use stages::{geodesic_probe, run_stage, run_stages, StageOutcome};
pub use store::{write_atomic, Manifest, RunLock};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Synth,
    Ingest,
    Sessionize,
    Prespace,
    Embed,
    Fit,
    Geodesic,
    Diagnose,
    Compare,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::Synth,
        Stage::Ingest,
        Stage::Sessionize,
        Stage::Prespace,
        Stage::Embed,
        Stage::Fit,
        Stage::Geodesic,
        Stage::Diagnose,
        Stage::Compare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Synth => "synth",
            Stage::Ingest => "ingest",
            Stage::Sessionize => "sessionize",
            Stage::Prespace => "prespace",
            Stage::Embed => "embed",
            Stage::Fit => "fit",
            Stage::Geodesic => "geodesic",
            Stage::Diagnose => "diagnose",
            Stage::Compare => "compare",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| PipelineError::Validation(format!("unknown stage {s:?}")))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{0}")]
    Validation(String),
    #[error("missing input {}: produced by {producer}", path.display())]
    MissingInput { path: PathBuf, producer: String },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("output directory is locked by another run ({}); remove it if no run is active", .0.display())]
    Locked(PathBuf),
    #[error("unreadable artifact {}: {message}", path.display())]
    Artifact { path: PathBuf, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PipelineError {
    /// 1 validation, 2 missing or unreadable input, 3 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Validation(_) | PipelineError::Locked(_) => 1,
            PipelineError::MissingInput { .. } | PipelineError::Artifact { .. } | PipelineError::Io(_) => 2,
            PipelineError::Numeric(_) => 3,
        }
    }
}

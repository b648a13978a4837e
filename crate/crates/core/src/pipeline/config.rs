use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineError;
use crate::diagnostics::RoughnessOptions;
use crate::geometry::FitOptions;
use crate::logmodel::{LogFormat, SessionParams, SynthConfig, DEFAULT_GAP_MS, DEFAULT_MIN_LENGTH};
use crate::metricspace::{Bm25Params, DistanceMethod};
use crate::skeleton::{default_k, EmbedOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    /// Log file; defaults to the synth stage output.
    pub path: Option<PathBuf>,
    pub format: LogFormat,
}

impl Default for InputConfig {
    fn default() -> Self {
        Self {
            path: None,
            format: LogFormat::Tsv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    pub gap_threshold_ms: u64,
    pub min_length: usize,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            gap_threshold_ms: DEFAULT_GAP_MS,
            min_length: DEFAULT_MIN_LENGTH,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct DistanceConfig {
    pub method: DistanceMethod,
    pub bm25: Bm25Params,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SkeletonConfig {
    /// Spatial dimension.
    pub n: usize,
    /// Neighbours per point; defaults to `max(3, n + 1)`.
    pub k: Option<usize>,
}

impl Default for SkeletonConfig {
    fn default() -> Self {
        Self { n: 2, k: None }
    }
}

impl SkeletonConfig {
    pub fn k(&self) -> usize {
        self.k.unwrap_or_else(|| default_k(self.n))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeodesicConfig {
    /// Start point; defaults to the first point of `thread` (or of the first thread).
    pub x0: Option<Vec<f64>>,
    /// Initial velocity; defaults to the first observed step of that thread.
    pub v0: Option<Vec<f64>>,
    pub thread: Option<String>,
    pub t_end: f64,
    pub step: f64,
}

impl Default for GeodesicConfig {
    fn default() -> Self {
        Self {
            x0: None,
            v0: None,
            thread: None,
            t_end: 1.0,
            step: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnoseConfig {
    pub prominence: f64,
    /// Earlier `roughness.jsonl` to report a smoothing delta against.
    pub baseline: Option<PathBuf>,
}

impl Default for DiagnoseConfig {
    fn default() -> Self {
        Self {
            prominence: RoughnessOptions::default().prominence,
            baseline: None,
        }
    }
}

impl DiagnoseConfig {
    pub fn options(&self) -> RoughnessOptions {
        RoughnessOptions {
            prominence: self.prominence,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    /// The other environment's `space.json`.
    pub other: Option<PathBuf>,
    /// Thread pairs `[ours, theirs]`; empty pairs threads with equal ids.
    pub pairs: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub output_dir: PathBuf,
    pub input: InputConfig,
    pub session: SessionConfig,
    pub distance: DistanceConfig,
    pub skeleton: SkeletonConfig,
    pub embedding: EmbedOptions,
    pub grid: FitOptions,
    pub geodesic: GeodesicConfig,
    pub diagnose: DiagnoseConfig,
    pub compare: CompareConfig,
    pub synth: SynthConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            output_dir: PathBuf::from("out"),
            input: InputConfig::default(),
            session: SessionConfig::default(),
            distance: DistanceConfig::default(),
            skeleton: SkeletonConfig::default(),
            embedding: EmbedOptions::default(),
            grid: FitOptions::default(),
            geodesic: GeodesicConfig::default(),
            diagnose: DiagnoseConfig::default(),
            compare: CompareConfig::default(),
            synth: SynthConfig::default(),
        }
    }
}

fn invalid(msg: impl Into<String>) -> PipelineError {
    PipelineError::Validation(msg.into())
}

impl PipelineConfig {
    /// Parse TOML text, apply `key=value` overrides (dotted keys, TOML
    /// values; bare words are taken as strings) and validate.
    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self, PipelineError> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| invalid(format!("config: {e}")))?;
        for ov in overrides {
            apply_override(&mut table, ov)?;
        }
        let cfg: Self = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| invalid(format!("config: {}", e.message())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, PipelineError> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| PipelineError::MissingInput {
                path: p.to_path_buf(),
                producer: format!("the config file ({e})"),
            })?,
            None => String::new(),
        };
        Self::from_toml_with_overrides(&text, overrides)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.output_dir.as_os_str().is_empty() {
            return Err(invalid("output_dir must not be empty"));
        }
        SessionParams::new(self.session.gap_threshold_ms, self.session.min_length).map_err(|_| {
            invalid(format!(
                "session.gap_threshold_ms = {} must be > 0 and session.min_length = {} must be >= 1",
                self.session.gap_threshold_ms, self.session.min_length
            ))
        })?;
        self.distance
            .bm25
            .validate()
            .map_err(|e| invalid(format!("distance.bm25: {e}")))?;
        if self.skeleton.n == 0 {
            return Err(invalid("skeleton.n = 0 must be >= 1"));
        }
        if self.skeleton.k == Some(0) {
            return Err(invalid("skeleton.k = 0 must be >= 1"));
        }
        let e = &self.embedding;
        if e.max_iters == 0 {
            return Err(invalid("embedding.max_iters = 0 must be >= 1"));
        }
        if !(e.tolerance.is_finite() && e.tolerance >= 0.0) {
            return Err(invalid(format!("embedding.tolerance = {} must be >= 0", e.tolerance)));
        }
        self.grid.validate().map_err(|e| invalid(e.to_string()))?;
        let g = &self.geodesic;
        if !(g.t_end.is_finite() && g.t_end > 0.0) {
            return Err(invalid(format!("geodesic.t_end = {} must be > 0", g.t_end)));
        }
        if !(g.step.is_finite() && g.step > 0.0) {
            return Err(invalid(format!("geodesic.step = {} must be > 0", g.step)));
        }
        let m = self.skeleton.n + 1;
        for (name, v) in [("x0", &g.x0), ("v0", &g.v0)] {
            if let Some(v) = v {
                if v.len() != m || v.iter().any(|c| !c.is_finite()) {
                    return Err(invalid(format!("geodesic.{name} must hold {m} finite numbers")));
                }
            }
        }
        let p = self.diagnose.prominence;
        if !(p.is_finite() && p >= 0.0) {
            return Err(invalid(format!("diagnose.prominence = {p} must be >= 0")));
        }
        self.synth.validate().map_err(|e| invalid(e.to_string()))?;
        Ok(())
    }

    /// SHA-256 of the configuration with `output_dir` removed, over a
    /// canonical JSON rendering, so formatting of the source file does not
    /// matter.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("output_dir");
        }
        sha256_hex(v.to_string().as_bytes())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn apply_override(table: &mut toml::Table, ov: &str) -> Result<(), PipelineError> {
    let (key, raw) = ov
        .split_once('=')
        .ok_or_else(|| invalid(format!("override {ov:?} must look like key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(invalid(format!("override key {key:?} is malformed")));
    }
    let mut cur = table;
    for part in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| invalid(format!("override {key:?}: {part} is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

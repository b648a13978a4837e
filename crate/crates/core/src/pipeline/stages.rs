use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::config::{sha256_hex, PipelineConfig};
use super::store::{hash_inputs, stage_dir, Manifest, Outputs, RunLock};
use super::{PipelineError, Stage};
use crate::diagnostics::{compare_environments, roughness, smoothing_delta, write_distortion_csv, RoughnessReport};
use crate::geometry::{
    curve_energy, curve_length, fit_metric_field, integrate_geodesic, GeodesicRun, GeometryError, MetricField, Sample,
    StopReason, Trajectory, TrajectoryKind,
};
use crate::logmodel::{
    extract_clickstreams, ground_truth_lines, read_log, synth_generate, write_log, ClickEvent, Clickstream, LogError,
    LogFormat, SessionParams,
};
use crate::metricspace::{build_prespace, CorpusStats, DistanceModel, LayeredPreSpace, MetricError};
use crate::skeleton::{embed_layers, form_simplices, link_nearest_neighbors, EmbeddedSpace, SkeletonError};

const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageOutcome {
    Ran,
    UpToDate,
}

impl From<LogError> for PipelineError {
    fn from(e: LogError) -> Self {
        match e {
            LogError::Io(e) => PipelineError::Io(e),
            other => PipelineError::Validation(other.to_string()),
        }
    }
}

impl From<MetricError> for PipelineError {
    fn from(e: MetricError) -> Self {
        match e {
            MetricError::Io(e) => PipelineError::Io(e),
            other => PipelineError::Validation(other.to_string()),
        }
    }
}

impl From<SkeletonError> for PipelineError {
    fn from(e: SkeletonError) -> Self {
        PipelineError::Validation(e.to_string())
    }
}

impl From<GeometryError> for PipelineError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::InvalidParam(m) => PipelineError::Validation(m),
            GeometryError::Io(e) => PipelineError::Io(e),
            other => PipelineError::Numeric(other.to_string()),
        }
    }
}

fn log_name(format: LogFormat) -> &'static str {
    match format {
        LogFormat::Tsv => "log.tsv",
        LogFormat::Jsonlines => "log.jsonl",
    }
}

fn to_jsonl<T: Serialize>(items: &[T]) -> String {
    items
        .iter()
        .map(|i| serde_json::to_string(i).expect("serializable") + "\n")
        .collect()
}

fn pretty<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn artifact_err(path: &Path, message: impl ToString) -> PipelineError {
    PipelineError::Artifact {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, PipelineError> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| artifact_err(path, format!("line {}: {e}", i + 1)))?);
    }
    Ok(out)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, PipelineError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| artifact_err(path, e))
}

fn read_space(path: &Path) -> Result<EmbeddedSpace, PipelineError> {
    let mut space: EmbeddedSpace = read_json(path)?;
    space.reindex();
    Ok(space)
}

fn read_field(path: &Path) -> Result<MetricField, PipelineError> {
    let reader = BufReader::new(File::open(path)?);
    MetricField::read_jsonl(reader).map_err(|e| artifact_err(path, e))
}

struct Paths {
    root: PathBuf,
}

impl Paths {
    fn file(&self, stage: Stage, name: &str) -> PathBuf {
        stage_dir(&self.root, stage).join(name)
    }

    fn input(&self, stage: Stage, name: &str) -> (PathBuf, String) {
        (self.file(stage, name), format!("stage '{stage}'"))
    }
}

/// Declared inputs of a stage, each with the name of what produces it.
fn stage_inputs(stage: Stage, cfg: &PipelineConfig, p: &Paths) -> Vec<(PathBuf, String)> {
    match stage {
        Stage::Synth => vec![],
        Stage::Ingest => match &cfg.input.path {
            Some(path) => vec![(path.clone(), "the query log named by input.path".into())],
            None => vec![p.input(Stage::Synth, log_name(cfg.input.format))],
        },
        Stage::Sessionize => vec![p.input(Stage::Ingest, "events.jsonl")],
        Stage::Prespace => vec![
            p.input(Stage::Ingest, "events.jsonl"),
            p.input(Stage::Sessionize, "streams.jsonl"),
        ],
        Stage::Embed => vec![p.input(Stage::Prespace, "prespace.json")],
        Stage::Fit => vec![p.input(Stage::Embed, "space.json")],
        Stage::Geodesic => {
            let mut v = vec![p.input(Stage::Fit, "metric.jsonl")];
            if cfg.geodesic.x0.is_none() || cfg.geodesic.v0.is_none() {
                v.push(p.input(Stage::Embed, "space.json"));
            }
            v
        }
        Stage::Diagnose => {
            let mut v = vec![p.input(Stage::Embed, "space.json"), p.input(Stage::Fit, "metric.jsonl")];
            if let Some(b) = &cfg.diagnose.baseline {
                v.push((b.clone(), "an earlier diagnose run (diagnose.baseline)".into()));
            }
            v
        }
        Stage::Compare => {
            let mut v = vec![p.input(Stage::Embed, "space.json")];
            if let Some(o) = &cfg.compare.other {
                v.push((o.clone(), "the other environment's embed stage (compare.other)".into()));
            }
            v
        }
    }
}

/// Hash of the configuration fields a stage depends on.
fn stage_config_hash(stage: Stage, cfg: &PipelineConfig) -> String {
    let v = match stage {
        Stage::Synth => serde_json::json!([cfg.synth, cfg.input.format]),
        Stage::Ingest => serde_json::json!(cfg.input),
        Stage::Sessionize => serde_json::json!(cfg.session),
        Stage::Prespace => serde_json::json!(cfg.distance),
        Stage::Embed => serde_json::json!([cfg.skeleton, cfg.embedding]),
        Stage::Fit => serde_json::json!(cfg.grid),
        Stage::Geodesic => serde_json::json!(cfg.geodesic),
        Stage::Diagnose => serde_json::json!(cfg.diagnose),
        Stage::Compare => serde_json::json!(cfg.compare),
    };
    sha256_hex(v.to_string().as_bytes())
}

/// Run one stage under the output directory lock.
pub fn run_stage(stage: Stage, cfg: &PipelineConfig, force: bool) -> Result<StageOutcome, PipelineError> {
    let _lock = RunLock::acquire(&cfg.output_dir)?;
    run_unlocked(stage, cfg, force)
}

/// Run stages in order under one lock, stopping at the first failure.
pub fn run_stages(
    stages: &[Stage],
    cfg: &PipelineConfig,
    force: bool,
    mut on_done: impl FnMut(Stage, StageOutcome),
) -> Result<(), PipelineError> {
    let _lock = RunLock::acquire(&cfg.output_dir)?;
    for &stage in stages {
        let outcome = run_unlocked(stage, cfg, force)?;
        on_done(stage, outcome);
    }
    Ok(())
}

/// Integrate a geodesic on the fitted field with the given start overrides
/// and write `geodesic/trajectory.csv` and `geodesic/summary.json`.
pub fn geodesic_probe(
    cfg: &PipelineConfig,
    x0: Option<Vec<f64>>,
    v0: Option<Vec<f64>>,
    t_end: Option<f64>,
    step: Option<f64>,
    force: bool,
) -> Result<StageOutcome, PipelineError> {
    let mut cfg = cfg.clone();
    let g = &mut cfg.geodesic;
    g.x0 = x0.or(g.x0.take());
    g.v0 = v0.or(g.v0.take());
    g.t_end = t_end.unwrap_or(g.t_end);
    g.step = step.unwrap_or(g.step);
    cfg.validate()?;
    run_stage(Stage::Geodesic, &cfg, force)
}

fn run_unlocked(stage: Stage, cfg: &PipelineConfig, force: bool) -> Result<StageOutcome, PipelineError> {
    let paths = Paths {
        root: cfg.output_dir.clone(),
    };
    let dir = stage_dir(&paths.root, stage);
    let inputs = hash_inputs(&paths.root, &stage_inputs(stage, cfg, &paths))?;
    let stage_hash = stage_config_hash(stage, cfg);
    if !force {
        if let Some(m) = Manifest::read(&dir) {
            if m.stage_config_hash == stage_hash
                && m.inputs == inputs
                && m.tool_version == TOOL_VERSION
                && m.outputs_intact(&dir)
            {
                return Ok(StageOutcome::UpToDate);
            }
        }
    }
    let _ = std::fs::remove_file(Manifest::path(&dir));
    let outputs = match stage {
        Stage::Synth => synth(cfg)?,
        Stage::Ingest => ingest(cfg, &paths)?,
        Stage::Sessionize => sessionize(cfg, &paths)?,
        Stage::Prespace => prespace(cfg, &paths)?,
        Stage::Embed => embed(cfg, &paths)?,
        Stage::Fit => fit(cfg, &paths)?,
        Stage::Geodesic => {
            let (outputs, boundary) = geodesic(cfg, &paths)?;
            if let Some(t) = boundary {
                outputs.commit(&dir)?;
                return Err(PipelineError::Numeric(format!(
                    "geodesic left the grid interior at t = {t}; partial trajectory written to {}",
                    dir.display()
                )));
            }
            outputs
        }
        Stage::Diagnose => diagnose(cfg, &paths)?,
        Stage::Compare => compare(cfg, &paths)?,
    };
    let hashes = outputs.commit(&dir)?;
    Manifest {
        stage: stage.name().to_string(),
        tool_version: TOOL_VERSION.to_string(),
        config_hash: cfg.hash(),
        stage_config_hash: stage_hash,
        inputs,
        outputs: hashes,
    }
    .write(&dir)?;
    Ok(StageOutcome::Ran)
}

fn synth(cfg: &PipelineConfig) -> Result<Outputs, PipelineError> {
    let (events, truth) = synth_generate(&cfg.synth)?;
    let mut out = Outputs::default();
    let mut log = Vec::new();
    write_log(&mut log, &events, cfg.input.format)?;
    out.add(log_name(cfg.input.format), log);
    out.add_text(
        "ground_truth.jsonl",
        ground_truth_lines(&truth).into_iter().map(|l| l + "\n").collect(),
    );
    let calibration = serde_json::json!({
        "distance_scale": truth.distance_scale,
        "events": events.len(),
        "surface": cfg.synth.surface,
    });
    out.add_text("calibration.json", pretty(&calibration));
    Ok(out)
}

fn ingest(cfg: &PipelineConfig, p: &Paths) -> Result<Outputs, PipelineError> {
    let path = cfg
        .input
        .path
        .clone()
        .unwrap_or_else(|| p.file(Stage::Synth, log_name(cfg.input.format)));
    let (events, report) = read_log(BufReader::new(File::open(&path)?), cfg.input.format)?;
    let mut out = Outputs::default();
    out.add_text("events.jsonl", to_jsonl(&events));
    out.add_text("parse_report.json", pretty(&report));
    Ok(out)
}

fn sessionize(cfg: &PipelineConfig, p: &Paths) -> Result<Outputs, PipelineError> {
    let events: Vec<ClickEvent> = read_jsonl(&p.file(Stage::Ingest, "events.jsonl"))?;
    let total = events.len();
    let params = SessionParams::new(cfg.session.gap_threshold_ms, cfg.session.min_length)?;
    let streams = extract_clickstreams(events, params)?;
    let kept: usize = streams.iter().map(Clickstream::len).sum();
    let mut out = Outputs::default();
    out.add_text("streams.jsonl", to_jsonl(&streams));
    out.add_text(
        "summary.json",
        pretty(&serde_json::json!({"events": total, "streams": streams.len(), "events_in_streams": kept})),
    );
    Ok(out)
}

fn prespace(cfg: &PipelineConfig, p: &Paths) -> Result<Outputs, PipelineError> {
    let events: Vec<ClickEvent> = read_jsonl(&p.file(Stage::Ingest, "events.jsonl"))?;
    let streams: Vec<Clickstream> = read_jsonl(&p.file(Stage::Sessionize, "streams.jsonl"))?;
    let stats = CorpusStats::from_events(&events)?;
    let model = DistanceModel::new(cfg.distance.method, &stats, cfg.distance.bm25);
    let ps = build_prespace(&streams, &model)?;
    let mut out = Outputs::default();
    out.add_text("prespace.json", serde_json::to_string(&ps).expect("serializable") + "\n");
    for (t, layer) in ps.layers.iter().enumerate() {
        let mut buf = Vec::new();
        layer.write_csv(&mut buf)?;
        out.add(format!("layer_{t:03}.csv"), buf);
    }
    let mut buf = Vec::new();
    ps.write_thread_edges_csv(&mut buf)?;
    out.add("thread_edges.csv", buf);
    let mut buf = Vec::new();
    stats.write_jsonl(&mut buf)?;
    out.add("corpus_stats.jsonl", buf);
    Ok(out)
}

fn embed(cfg: &PipelineConfig, p: &Paths) -> Result<Outputs, PipelineError> {
    let ps: LayeredPreSpace = read_json(&p.file(Stage::Prespace, "prespace.json"))?;
    let n = cfg.skeleton.n;
    let skeleton = form_simplices(link_nearest_neighbors(&ps, cfg.skeleton.k()), n);
    let space = embed_layers(&ps, &skeleton, n, &cfg.embedding)?;
    let mut out = Outputs::default();
    out.add_text("space.json", serde_json::to_string(&space).expect("serializable") + "\n");
    let mut buf = Vec::new();
    space.write_points_jsonl(&mut buf)?;
    out.add("points.jsonl", buf);
    let mut buf = Vec::new();
    space.write_points_csv(&mut buf)?;
    out.add("points.csv", buf);
    let mut buf = Vec::new();
    space.write_cells_csv(&mut buf)?;
    out.add("cells.csv", buf);
    let mut buf = Vec::new();
    space.write_threads_jsonl(&mut buf)?;
    out.add("threads.jsonl", buf);
    let mut knn = String::from("a,b,dist\n");
    for e in &space.knn_edges {
        knn.push_str(&format!("{},{},{}\n", e.a, e.b, e.dist));
    }
    out.add_text("knn_edges.csv", knn);
    let report = serde_json::json!({
        "n": n,
        "k": skeleton.k,
        "points": space.points.len(),
        "cells": space.cells.len(),
        "stress_per_layer": space.stress_per_layer,
        "layers": space.layer_reports,
    });
    out.add_text("report.json", pretty(&report));
    Ok(out)
}

fn fit(cfg: &PipelineConfig, p: &Paths) -> Result<Outputs, PipelineError> {
    let space = read_space(&p.file(Stage::Embed, "space.json"))?;
    let (field, report) = fit_metric_field(&space, &cfg.grid)?;
    let mut out = Outputs::default();
    let mut buf = Vec::new();
    field.write_jsonl(&mut buf)?;
    out.add("metric.jsonl", buf);
    out.add_text("report.json", pretty(&report));
    Ok(out)
}

/// Returns the outputs and, when the run hit the boundary, the last time.
fn geodesic(cfg: &PipelineConfig, p: &Paths) -> Result<(Outputs, Option<f64>), PipelineError> {
    let field = read_field(&p.file(Stage::Fit, "metric.jsonl"))?;
    let g = &cfg.geodesic;
    let (x0, v0) = match (&g.x0, &g.v0) {
        (Some(x), Some(v)) => (x.clone(), v.clone()),
        _ => {
            let space = read_space(&p.file(Stage::Embed, "space.json"))?;
            let thread = match &g.thread {
                Some(id) => space
                    .threads
                    .iter()
                    .find(|t| &t.stream_id == id)
                    .ok_or_else(|| PipelineError::Validation(format!("geodesic.thread {id:?} not found")))?,
                None => space
                    .threads
                    .iter()
                    .find(|t| t.points.len() >= 2)
                    .ok_or_else(|| PipelineError::Validation("no thread with 2 points to start from".into()))?,
            };
            let pts = space.thread_coords(thread);
            if pts.len() < 2 {
                return Err(PipelineError::Validation(format!(
                    "thread {:?} has fewer than 2 points",
                    thread.stream_id
                )));
            }
            let step: Vec<f64> = pts[1].iter().zip(&pts[0]).map(|(b, a)| b - a).collect();
            (g.x0.clone().unwrap_or_else(|| pts[0].clone()), g.v0.clone().unwrap_or(step))
        }
    };
    if x0.len() != field.dim() || v0.len() != field.dim() {
        return Err(PipelineError::Validation(format!(
            "geodesic.x0 and geodesic.v0 need {} components",
            field.dim()
        )));
    }
    if !field.grid().is_interior(&x0) {
        return Err(PipelineError::Validation(format!(
            "geodesic.x0 = {x0:?} lies outside the grid interior"
        )));
    }
    let run = match integrate_geodesic(&field, &x0, &v0, g.t_end, g.step) {
        Err(GeometryError::ImmediateBoundary(_)) => GeodesicRun {
            trajectory: Trajectory::new(
                TrajectoryKind::Geodesic,
                vec![Sample {
                    t: 0.0,
                    x: x0.clone(),
                    v: v0.clone(),
                }],
            )?,
            stop: StopReason::Boundary,
        },
        other => other?,
    };
    let (energy, length) = if run.trajectory.len() >= 2 {
        (
            Some(curve_energy(&field, &run.trajectory)?),
            Some(curve_length(&field, &run.trajectory)?),
        )
    } else {
        (None, None)
    };
    let last = run.trajectory.last().expect("start sample");
    let mut out = Outputs::default();
    let mut buf = Vec::new();
    run.trajectory.write_csv(&mut buf)?;
    out.add("trajectory.csv", buf);
    let summary = serde_json::json!({
        "x0": x0,
        "v0": v0,
        "t_end": g.t_end,
        "step": g.step,
        "stop": run.stop,
        "samples": run.trajectory.len(),
        "t_last": last.t,
        "x_last": last.x,
        "energy": energy,
        "length": length,
    });
    out.add_text("summary.json", pretty(&summary));
    let boundary = (run.stop == StopReason::Boundary).then_some(last.t);
    Ok((out, boundary))
}

fn diagnose(cfg: &PipelineConfig, p: &Paths) -> Result<Outputs, PipelineError> {
    let space = read_space(&p.file(Stage::Embed, "space.json"))?;
    let field = read_field(&p.file(Stage::Fit, "metric.jsonl"))?;
    let report = roughness(&space, &field, &cfg.diagnose.options());
    let mut out = Outputs::default();
    out.add_text("roughness.txt", report.to_text());
    out.add_text("roughness.jsonl", report.to_json_line() + "\n");
    let mut buf = Vec::new();
    write_distortion_csv(&field, space.n, &mut buf)?;
    out.add("distortion.csv", buf);
    if let Some(base) = &cfg.diagnose.baseline {
        let before: Vec<RoughnessReport> = read_jsonl(base)?;
        let before = before.first().ok_or_else(|| artifact_err(base, "empty roughness report"))?;
        let delta = smoothing_delta(before, &report).map_err(|e| PipelineError::Validation(e.to_string()))?;
        out.add_text("smoothing_delta.txt", delta.to_text());
        out.add_text("smoothing_delta.json", pretty(&delta));
    }
    Ok(out)
}

fn compare(cfg: &PipelineConfig, p: &Paths) -> Result<Outputs, PipelineError> {
    let other = cfg
        .compare
        .other
        .as_ref()
        .ok_or_else(|| PipelineError::Validation("compare.other must name the other environment's space.json".into()))?;
    let a = read_space(&p.file(Stage::Embed, "space.json"))?;
    let b = read_space(other)?;
    let pairs: Vec<(String, String)> = if cfg.compare.pairs.is_empty() {
        let theirs: BTreeMap<&str, ()> = b.threads.iter().map(|t| (t.stream_id.as_str(), ())).collect();
        a.threads
            .iter()
            .filter(|t| theirs.contains_key(t.stream_id.as_str()))
            .map(|t| (t.stream_id.clone(), t.stream_id.clone()))
            .collect()
    } else {
        cfg.compare.pairs.iter().map(|[x, y]| (x.clone(), y.clone())).collect()
    };
    let report = compare_environments(&a, &b, &pairs).map_err(|e| PipelineError::Validation(e.to_string()))?;
    let mut out = Outputs::default();
    out.add_text("report.txt", report.to_text());
    out.add_text("report.jsonl", report.to_jsonl());
    Ok(out)
}

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::graph::{KnnEdge, Skeleton};
use super::mds::{embed_distance_matrix, MdsOptions};
use super::procrustes::rigid_align;
use super::SkeletonError;
use crate::metricspace::{LayeredPreSpace, PointId, ThreadEdge};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbedOptions {
    pub max_iters: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        let m = MdsOptions::default();
        Self {
            max_iters: m.max_iters,
            tolerance: m.tolerance,
            seed: m.seed,
        }
    }
}

impl From<EmbedOptions> for MdsOptions {
    fn from(o: EmbedOptions) -> Self {
        MdsOptions {
            max_iters: o.max_iters,
            tolerance: o.tolerance,
            seed: o.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedPoint {
    pub id: PointId,
    pub layer: usize,
    /// `n` spatial coordinates followed by the layer label.
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thread {
    pub stream_id: String,
    /// Point ids in stream order.
    pub points: Vec<PointId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerReport {
    pub layer: usize,
    pub points: usize,
    pub stress_history: Vec<f64>,
    pub converged: bool,
    pub random_start: bool,
}

/// Points in `n + 1` dimensions: `n` spatial coordinates per layer and the
/// layer label as the last (temporal) coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedSpace {
    pub n: usize,
    /// Ordered by layer, then by point id.
    pub points: Vec<EmbeddedPoint>,
    pub threads: Vec<Thread>,
    pub cells: Vec<Vec<PointId>>,
    pub thread_edges: Vec<ThreadEdge>,
    pub knn_edges: Vec<KnnEdge>,
    pub stress_per_layer: Vec<f64>,
    pub layer_reports: Vec<LayerReport>,
    #[serde(skip)]
    index: BTreeMap<PointId, usize>,
}

impl EmbeddedSpace {
    pub fn new(
        n: usize,
        points: Vec<EmbeddedPoint>,
        threads: Vec<Thread>,
        cells: Vec<Vec<PointId>>,
        thread_edges: Vec<ThreadEdge>,
        knn_edges: Vec<KnnEdge>,
        layer_reports: Vec<LayerReport>,
    ) -> Self {
        let stress_per_layer = layer_reports
            .iter()
            .map(|r| *r.stress_history.last().unwrap_or(&0.0))
            .collect();
        let mut s = Self {
            n,
            points,
            threads,
            cells,
            thread_edges,
            knn_edges,
            stress_per_layer,
            layer_reports,
            index: BTreeMap::new(),
        };
        s.reindex();
        s
    }

    /// Rebuild the id lookup; needed after deserialising.
    pub fn reindex(&mut self) {
        self.index = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id, i))
            .collect();
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn coord(&self, id: PointId) -> Option<&[f64]> {
        self.index.get(&id).map(|&i| self.points[i].coords.as_slice())
    }

    pub fn num_layers(&self) -> usize {
        self.points.iter().map(|p| p.layer + 1).max().unwrap_or(0)
    }

    pub fn layer_points(&self, layer: usize) -> impl Iterator<Item = &EmbeddedPoint> {
        self.points.iter().filter(move |p| p.layer == layer)
    }

    /// Coordinates of a thread in order.
    pub fn thread_coords(&self, thread: &Thread) -> Vec<Vec<f64>> {
        thread
            .points
            .iter()
            .filter_map(|p| self.coord(*p).map(<[f64]>::to_vec))
            .collect()
    }

    /// Map with a rigid motion of the spatial coordinates (temporal untouched).
    pub fn map_spatial(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let mut out = self.clone();
        for p in &mut out.points {
            let t = p.coords[self.n];
            let mut c = f(&p.coords[..self.n]);
            c.push(t);
            p.coords = c;
        }
        out
    }

    /// One JSON object per point: `{"id": "s:t", "layer": t, "coords": [...]}`.
    pub fn write_points_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for p in &self.points {
            let line = serde_json::json!({"id": p.id.to_string(), "layer": p.layer, "coords": p.coords});
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn write_points_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut header = vec!["id".to_string(), "layer".to_string()];
        header.extend((0..self.n).map(|i| format!("x{i}")));
        header.push("t".to_string());
        writeln!(out, "{}", header.join(","))?;
        for p in &self.points {
            let cs: Vec<String> = p.coords.iter().map(|c| c.to_string()).collect();
            writeln!(out, "{},{},{}", p.id, p.layer, cs.join(","))?;
        }
        Ok(())
    }

    /// Cells as rows of indices into the point list.
    pub fn write_cells_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for cell in &self.cells {
            let idx: Vec<String> = cell
                .iter()
                .filter_map(|p| self.index.get(p).map(usize::to_string))
                .collect();
            writeln!(out, "{}", idx.join(","))?;
        }
        Ok(())
    }

    pub fn write_threads_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for t in &self.threads {
            let ids: Vec<String> = t.points.iter().map(PointId::to_string).collect();
            writeln!(out, "{}", serde_json::json!({"stream": t.stream_id, "points": ids}))?;
        }
        Ok(())
    }
}

/// Embed every layer with stress majorization, chain rigid alignments
/// between consecutive layers over the streams they share, and stack the
/// layers along the temporal axis.
///
/// Alignments may include a reflection, since a layer embedding is only
/// defined up to an orthogonal transform.
pub fn embed_layers(
    prespace: &LayeredPreSpace,
    skeleton: &Skeleton,
    n: usize,
    opts: &EmbedOptions,
) -> Result<EmbeddedSpace, SkeletonError> {
    if n == 0 {
        return Err(SkeletonError::InvalidParam("spatial dimension n must be >= 1".into()));
    }
    if let Some(t) = prespace.layers.iter().position(|l| l.is_empty()) {
        return Err(SkeletonError::InvalidParam(format!("layer {t} is empty")));
    }
    let mds_opts: MdsOptions = (*opts).into();

    let mut layer_coords: Vec<BTreeMap<PointId, Vec<f64>>> = Vec::new();
    let mut reports = Vec::new();
    for (t, layer) in prespace.layers.iter().enumerate() {
        let res = embed_distance_matrix(&layer.dist, layer.len(), n, &mds_opts);
        let mut coords: BTreeMap<PointId, Vec<f64>> = layer
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (*p, res.point(i).to_vec()))
            .collect();
        if let Some(prev) = layer_coords.last() {
            let shared: Vec<PointId> = layer
                .points
                .iter()
                .copied()
                .filter(|p| p.pos > 0 && prev.contains_key(&PointId { stream: p.stream, pos: p.pos - 1 }))
                .collect();
            if !shared.is_empty() {
                let src: Vec<Vec<f64>> = shared.iter().map(|p| coords[p].clone()).collect();
                let dst: Vec<Vec<f64>> = shared
                    .iter()
                    .map(|p| prev[&PointId { stream: p.stream, pos: p.pos - 1 }].clone())
                    .collect();
                let tf = rigid_align(&src, &dst, true);
                for c in coords.values_mut() {
                    *c = tf.apply(c);
                }
            }
        }
        reports.push(LayerReport {
            layer: t,
            points: layer.len(),
            stress_history: res.stress_history.clone(),
            converged: res.converged,
            random_start: res.random_start,
        });
        layer_coords.push(coords);
    }

    let mut points = Vec::with_capacity(prespace.num_points());
    for (t, coords) in layer_coords.into_iter().enumerate() {
        for (id, mut c) in coords {
            c.push(t as f64);
            points.push(EmbeddedPoint { id, layer: t, coords: c });
        }
    }
    let threads = prespace
        .stream_ids
        .iter()
        .enumerate()
        .map(|(s, id)| Thread {
            stream_id: id.clone(),
            points: (0..prespace.stream_len(s)).map(|t| PointId::new(s, t)).collect(),
        })
        .collect();

    Ok(EmbeddedSpace::new(
        n,
        points,
        threads,
        skeleton.cells.clone(),
        prespace.thread_edges.clone(),
        skeleton.knn_edges.clone(),
        reports,
    ))
}

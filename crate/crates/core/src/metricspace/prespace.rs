use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{DistanceModel, MetricError};
use crate::logmodel::Clickstream;

/// A click addressed by its stream index and position within the stream.
/// Ordering is by stream first, which is the tie-break order used throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PointId {
    pub stream: u32,
    pub pos: u32,
}

impl PointId {
    pub fn new(stream: usize, pos: usize) -> Self {
        Self {
            stream: stream as u32,
            pos: pos as u32,
        }
    }

    /// Layer label; a click at position `t` of its stream lives in layer `t`.
    pub fn layer(&self) -> usize {
        self.pos as usize
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.stream, self.pos)
    }
}

impl FromStr for PointId {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MetricError::InvalidParam(format!("invalid point id {s:?}"));
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        Ok(Self {
            stream: a.parse().map_err(|_| bad())?,
            pos: b.parse().map_err(|_| bad())?,
        })
    }
}

/// One time slice: the `t`-th click of every stream longer than `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub points: Vec<PointId>,
    /// Row-major symmetric distance matrix with a zero diagonal.
    pub dist: Vec<f64>,
}

impl Layer {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.points.len() + j]
    }

    pub fn index_of(&self, id: PointId) -> Option<usize> {
        self.points.binary_search(&id).ok()
    }

    /// CSV with point ids as row and column headers.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header: Vec<String> = self.points.iter().map(|p| p.to_string()).collect();
        writeln!(out, "point,{}", header.join(","))?;
        for (i, p) in self.points.iter().enumerate() {
            let row: Vec<String> = (0..self.len()).map(|j| self.get(i, j).to_string()).collect();
            writeln!(out, "{p},{}", row.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreadEdge {
    pub from: PointId,
    pub to: PointId,
    pub dist: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayeredPreSpace {
    /// Stream ids indexed by `PointId::stream`.
    pub stream_ids: Vec<String>,
    pub layers: Vec<Layer>,
    pub thread_edges: Vec<ThreadEdge>,
}

impl LayeredPreSpace {
    pub fn num_points(&self) -> usize {
        self.layers.iter().map(Layer::len).sum()
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> + '_ {
        self.layers.iter().flat_map(|l| l.points.iter().copied())
    }

    /// Number of clicks in the given stream.
    pub fn stream_len(&self, stream: usize) -> usize {
        self.layers
            .iter()
            .take_while(|l| l.index_of(PointId::new(stream, l.points[0].layer())).is_some())
            .count()
    }

    pub fn write_thread_edges_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "from,to,dist")?;
        for e in &self.thread_edges {
            writeln!(out, "{},{},{}", e.from, e.to, e.dist)?;
        }
        Ok(())
    }
}

/// Build the layered pre-space.
///
/// Layer-internal distances and thread-edge distances use the same model.
pub fn build_prespace(
    streams: &[Clickstream],
    model: &DistanceModel<'_>,
) -> Result<LayeredPreSpace, MetricError> {
    if streams.is_empty() {
        return Err(MetricError::InvalidParam("no clickstreams".into()));
    }
    if let Some(s) = streams.iter().find(|s| s.len() < 2) {
        return Err(MetricError::InvalidParam(format!(
            "stream {} has fewer than 2 clicks",
            s.stream_id
        )));
    }
    let prepared: Vec<Vec<_>> = streams
        .iter()
        .map(|s| s.events.iter().map(|e| model.prepare(e)).collect())
        .collect();
    let depth = streams.iter().map(Clickstream::len).max().unwrap_or(0);

    let mut layers = Vec::with_capacity(depth);
    for t in 0..depth {
        let points: Vec<PointId> = streams
            .iter()
            .enumerate()
            .filter(|(_, s)| s.len() > t)
            .map(|(i, _)| PointId::new(i, t))
            .collect();
        let n = points.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let a = &prepared[points[i].stream as usize][t];
                let b = &prepared[points[j].stream as usize][t];
                let d = model.distance_prepared(a, b)?;
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        layers.push(Layer { points, dist });
    }

    let mut thread_edges = Vec::new();
    for (i, s) in streams.iter().enumerate() {
        for t in 0..s.len() - 1 {
            let d = model.distance_prepared(&prepared[i][t], &prepared[i][t + 1])?;
            thread_edges.push(ThreadEdge {
                from: PointId::new(i, t),
                to: PointId::new(i, t + 1),
                dist: d,
            });
        }
    }

    Ok(LayeredPreSpace {
        stream_ids: streams.iter().map(|s| s.stream_id.clone()).collect(),
        layers,
        thread_edges,
    })
}

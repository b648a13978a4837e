use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{key_values, DiagnosticsError};
use crate::geometry::MetricField;
use crate::skeleton::EmbeddedSpace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoughnessOptions {
    /// Minimum distortion for a local maximum to count as a peak.
    pub prominence: f64,
}

impl Default for RoughnessOptions {
    fn default() -> Self {
        Self { prominence: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpStats {
    pub mean: f64,
    pub p95: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoughnessReport {
    pub n: usize,
    /// Node counts of the spatial grid axes.
    pub spatial_nodes: Vec<usize>,
    pub prominence: f64,
    pub gradient_rms: f64,
    pub peak_count: usize,
    pub max_peak_height: f64,
    /// Consecutive thread step lengths in units of the median step.
    pub jump_stats: JumpStats,
}

impl RoughnessReport {
    pub fn to_text(&self) -> String {
        let nodes: Vec<String> = self.spatial_nodes.iter().map(usize::to_string).collect();
        key_values(&[
            ("n", self.n.to_string()),
            ("spatial_nodes", nodes.join("x")),
            ("prominence", self.prominence.to_string()),
            ("gradient_rms", self.gradient_rms.to_string()),
            ("peak_count", self.peak_count.to_string()),
            ("max_peak_height", self.max_peak_height.to_string()),
            ("jump_mean", self.jump_stats.mean.to_string()),
            ("jump_p95", self.jump_stats.p95.to_string()),
            ("jump_max", self.jump_stats.max.to_string()),
        ])
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Log condition number of the spatial block at every grid node.
pub fn distortion_field(field: &MetricField, n: usize) -> Vec<f64> {
    let n = n.min(field.dim());
    (0..field.grid().num_nodes())
        .map(|node| {
            let g = field.node_metric(node);
            let block = g.view((0, 0), (n, n)).into_owned();
            let eig = block.symmetric_eigenvalues();
            let (lo, hi) = (eig.min(), eig.max());
            if lo > 0.0 && hi > lo {
                (hi / lo).ln()
            } else {
                0.0
            }
        })
        .collect()
}

/// CSV heightmap: node coordinates followed by the distortion value.
pub fn write_distortion_csv<W: Write>(field: &MetricField, n: usize, mut out: W) -> std::io::Result<()> {
    let grid = field.grid();
    let m = grid.dim();
    let mut header: Vec<String> = (0..n.min(m)).map(|i| format!("x{i}")).collect();
    header.extend((n.min(m)..m).map(|_| "t".to_string()));
    header.push("distortion".into());
    writeln!(out, "{}", header.join(","))?;
    for (node, d) in distortion_field(field, n).into_iter().enumerate() {
        let mut row: Vec<String> = grid.node_coords(node).iter().map(f64::to_string).collect();
        row.push(d.to_string());
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

fn jump_stats(space: &EmbeddedSpace) -> JumpStats {
    let n = space.n;
    let mut steps: Vec<f64> = Vec::new();
    for thread in &space.threads {
        let pts = space.thread_coords(thread);
        for w in pts.windows(2) {
            let d: f64 = (0..n).map(|a| (w[1][a] - w[0][a]).powi(2)).sum::<f64>().sqrt();
            steps.push(d);
        }
    }
    if steps.is_empty() {
        return JumpStats { mean: 0.0, p95: 0.0, max: 0.0 };
    }
    steps.sort_by(f64::total_cmp);
    let median = steps[(steps.len() - 1) / 2];
    let scale = if median > 0.0 { median } else { 1.0 };
    let k = ((0.95 * steps.len() as f64).ceil() as usize).clamp(1, steps.len()) - 1;
    JumpStats {
        mean: steps.iter().sum::<f64>() / steps.len() as f64 / scale,
        p95: steps[k] / scale,
        max: steps[steps.len() - 1] / scale,
    }
}

/// Distortion gradient, anisotropy peaks and thread jump statistics.
///
/// The gradient uses central differences along the spatial axes at every
/// interior node. A peak is an interior node whose distortion exceeds
/// `prominence` and is strictly larger than all of its neighbours in the
/// full surrounding block of nodes.
pub fn roughness(space: &EmbeddedSpace, field: &MetricField, opts: &RoughnessOptions) -> RoughnessReport {
    let n = space.n.min(field.dim());
    let grid = field.grid();
    let m = grid.dim();
    let dist = distortion_field(field, n);

    let mut grad_sq = 0.0;
    let mut count = 0usize;
    let mut peaks = 0usize;
    let mut max_peak: f64 = 0.0;
    let offsets: Vec<Vec<isize>> = (0..3usize.pow(m as u32))
        .map(|c| {
            let mut rem = c;
            (0..m)
                .map(|_| {
                    let o = (rem % 3) as isize - 1;
                    rem /= 3;
                    o
                })
                .collect()
        })
        .filter(|o: &Vec<isize>| o.iter().any(|&v| v != 0))
        .collect();
    for node in 0..grid.num_nodes() {
        let idx = grid.multi_index(node);
        if !grid.is_interior_node(&idx) {
            continue;
        }
        let mut g2 = 0.0;
        let mut nb = idx.clone();
        for a in 0..n {
            nb[a] = idx[a] + 1;
            let up = dist[grid.flat_index(&nb)];
            nb[a] = idx[a] - 1;
            let down = dist[grid.flat_index(&nb)];
            nb[a] = idx[a];
            let d = (up - down) / (2.0 * grid.spacing[a]);
            g2 += d * d;
        }
        grad_sq += g2;
        count += 1;

        let here = dist[node];
        if here > opts.prominence {
            let is_peak = offsets.iter().all(|o| {
                let j: Vec<usize> = idx.iter().zip(o).map(|(&i, &d)| (i as isize + d) as usize).collect();
                dist[grid.flat_index(&j)] < here
            });
            if is_peak {
                peaks += 1;
                max_peak = max_peak.max(here);
            }
        }
    }
    RoughnessReport {
        n: space.n,
        spatial_nodes: grid.nodes[..n].to_vec(),
        prominence: opts.prominence,
        gradient_rms: if count > 0 { (grad_sq / count as f64).sqrt() } else { 0.0 },
        peak_count: peaks,
        max_peak_height: max_peak,
        jump_stats: jump_stats(space),
    }
}

/// Signed differences `after - before` per statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingDelta {
    pub gradient_rms: f64,
    pub peak_count: i64,
    pub max_peak_height: f64,
    pub jump_mean: f64,
    pub jump_p95: f64,
    pub jump_max: f64,
    /// Both the gradient RMS and the highest peak went down.
    pub improved: bool,
}

impl SmoothingDelta {
    pub fn to_text(&self) -> String {
        key_values(&[
            ("delta_gradient_rms", self.gradient_rms.to_string()),
            ("delta_peak_count", self.peak_count.to_string()),
            ("delta_max_peak_height", self.max_peak_height.to_string()),
            ("delta_jump_mean", self.jump_mean.to_string()),
            ("delta_jump_p95", self.jump_p95.to_string()),
            ("delta_jump_max", self.jump_max.to_string()),
            ("improved", self.improved.to_string()),
        ])
    }
}

pub fn smoothing_delta(before: &RoughnessReport, after: &RoughnessReport) -> Result<SmoothingDelta, DiagnosticsError> {
    if before.n != after.n {
        return Err(DiagnosticsError::NotComparable(format!("n differs: {} vs {}", before.n, after.n)));
    }
    if before.spatial_nodes != after.spatial_nodes {
        return Err(DiagnosticsError::NotComparable(format!(
            "grid differs: {:?} vs {:?}",
            before.spatial_nodes, after.spatial_nodes
        )));
    }
    if before.prominence != after.prominence {
        return Err(DiagnosticsError::NotComparable(format!(
            "prominence differs: {} vs {}",
            before.prominence, after.prominence
        )));
    }
    let gradient_rms = after.gradient_rms - before.gradient_rms;
    let max_peak_height = after.max_peak_height - before.max_peak_height;
    Ok(SmoothingDelta {
        gradient_rms,
        peak_count: after.peak_count as i64 - before.peak_count as i64,
        max_peak_height,
        jump_mean: after.jump_stats.mean - before.jump_stats.mean,
        jump_p95: after.jump_stats.p95 - before.jump_stats.p95,
        jump_max: after.jump_stats.max - before.jump_stats.max,
        improved: gradient_rms < 0.0 && max_peak_height < 0.0,
    })
}

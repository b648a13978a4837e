use serde::{Deserialize, Serialize};

use super::{key_values, DiagnosticsError};
use crate::skeleton::{rigid_align, rms_distance, EmbeddedSpace, Thread};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub max: f64,
}

impl Summary {
    fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self { mean: 0.0, max: 0.0 };
        }
        Self {
            mean: values.iter().sum::<f64>() / values.len() as f64,
            max: values.iter().copied().fold(0.0, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDeviation {
    pub a: String,
    pub b: String,
    pub points: usize,
    pub frechet: f64,
    pub rms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub correspondence_size: usize,
    /// RMS distance between paired points after alignment.
    pub procrustes_residual: f64,
    /// Discrete Fréchet distance per matched pair.
    pub trajectory_deviation: Summary,
    /// Pointwise RMS distance per matched pair.
    pub pointwise_rms: Summary,
    pub pairs: Vec<PairDeviation>,
    /// Pairs left out because one side has fewer than 2 points.
    pub skipped: Vec<String>,
}

impl ComparisonReport {
    pub fn to_text(&self) -> String {
        key_values(&[
            ("correspondence_size", self.correspondence_size.to_string()),
            ("procrustes_residual", self.procrustes_residual.to_string()),
            ("trajectory_deviation_mean", self.trajectory_deviation.mean.to_string()),
            ("trajectory_deviation_max", self.trajectory_deviation.max.to_string()),
            ("pointwise_rms_mean", self.pointwise_rms.mean.to_string()),
            ("pointwise_rms_max", self.pointwise_rms.max.to_string()),
            ("skipped", self.skipped.join(" ")),
        ])
    }

    /// Summary line followed by one line per pair.
    pub fn to_jsonl(&self) -> String {
        let head = serde_json::json!({
            "kind": "summary",
            "correspondence_size": self.correspondence_size,
            "procrustes_residual": self.procrustes_residual,
            "trajectory_deviation": self.trajectory_deviation,
            "pointwise_rms": self.pointwise_rms,
            "skipped": self.skipped,
        });
        let mut out = format!("{head}\n");
        for p in &self.pairs {
            let mut v = serde_json::to_value(p).expect("pair serializes");
            v["kind"] = "pair".into();
            out.push_str(&format!("{v}\n"));
        }
        out
    }

    /// Parse the output of [`ComparisonReport::to_jsonl`].
    pub fn from_jsonl(text: &str) -> Result<Self, DiagnosticsError> {
        let bad = |e: serde_json::Error| DiagnosticsError::Format(e.to_string());
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let first = lines
            .next()
            .ok_or_else(|| DiagnosticsError::Format("empty report".into()))?;
        let mut head: serde_json::Value = serde_json::from_str(first).map_err(bad)?;
        if head["kind"] != "summary" {
            return Err(DiagnosticsError::Format("first line must be the summary".into()));
        }
        let mut pairs = Vec::new();
        for line in lines {
            let mut v: serde_json::Value = serde_json::from_str(line).map_err(bad)?;
            if v["kind"] != "pair" {
                return Err(DiagnosticsError::Format(format!("unexpected line {line}")));
            }
            v.as_object_mut().expect("object").remove("kind");
            pairs.push(v);
        }
        let obj = head.as_object_mut().expect("object");
        obj.remove("kind");
        obj.insert("pairs".into(), pairs.into());
        serde_json::from_value(head).map_err(bad)
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt()
}

/// Discrete Fréchet distance between two polylines.
pub fn discrete_frechet(p: &[Vec<f64>], q: &[Vec<f64>]) -> f64 {
    if p.is_empty() || q.is_empty() {
        return 0.0;
    }
    let m = q.len();
    let mut prev = vec![0.0f64; m];
    let mut cur = vec![0.0; m];
    for (i, pi) in p.iter().enumerate() {
        for j in 0..m {
            let d = euclid(pi, &q[j]);
            cur[j] = match (i, j) {
                (0, 0) => d,
                (0, _) => cur[j - 1].max(d),
                (_, 0) => prev[0].max(d),
                _ => prev[j].min(prev[j - 1]).min(cur[j - 1]).max(d),
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1]
}

fn find<'a>(space: &'a EmbeddedSpace, id: &str) -> Result<&'a Thread, DiagnosticsError> {
    space
        .threads
        .iter()
        .find(|t| t.stream_id == id)
        .ok_or_else(|| DiagnosticsError::UnknownThread(id.to_string()))
}

fn spatial(space: &EmbeddedSpace, thread: &Thread) -> Vec<Vec<f64>> {
    space
        .thread_coords(thread)
        .into_iter()
        .map(|mut c| {
            c.truncate(space.n);
            c
        })
        .collect()
}

/// Align `b` onto `a` over all matched thread points (paired by position in
/// the thread, truncated to the shorter one) and measure what remains.
///
/// The alignment is an orthogonal transform plus translation of the spatial
/// coordinates; reflections are allowed because each environment's
/// embedding is only fixed up to one.
pub fn compare_environments(
    a: &EmbeddedSpace,
    b: &EmbeddedSpace,
    correspondence: &[(String, String)],
) -> Result<ComparisonReport, DiagnosticsError> {
    if correspondence.is_empty() {
        return Err(DiagnosticsError::EmptyCorrespondence);
    }
    if a.n != b.n {
        return Err(DiagnosticsError::InvalidParam(format!(
            "spatial dimensions differ: {} vs {}",
            a.n, b.n
        )));
    }
    let mut used = Vec::new();
    let mut skipped = Vec::new();
    for (ia, ib) in correspondence {
        let pa = spatial(a, find(a, ia)?);
        let pb = spatial(b, find(b, ib)?);
        let len = pa.len().min(pb.len());
        if len < 2 {
            skipped.push(format!("{ia}~{ib}"));
            continue;
        }
        used.push((ia.clone(), ib.clone(), pa[..len].to_vec(), pb[..len].to_vec()));
    }
    if used.is_empty() {
        return Err(DiagnosticsError::NoUsablePairs);
    }
    let src: Vec<Vec<f64>> = used.iter().flat_map(|u| u.3.iter().cloned()).collect();
    let dst: Vec<Vec<f64>> = used.iter().flat_map(|u| u.2.iter().cloned()).collect();
    let tf = rigid_align(&src, &dst, true);
    let moved: Vec<Vec<f64>> = src.iter().map(|p| tf.apply(p)).collect();
    let residual = rms_distance(&moved, &dst);

    let mut pairs = Vec::with_capacity(used.len());
    for (ia, ib, pa, pb) in &used {
        let pb: Vec<Vec<f64>> = pb.iter().map(|p| tf.apply(p)).collect();
        pairs.push(PairDeviation {
            a: ia.clone(),
            b: ib.clone(),
            points: pa.len(),
            frechet: discrete_frechet(pa, &pb),
            rms: rms_distance(pa, &pb),
        });
    }
    let fr: Vec<f64> = pairs.iter().map(|p| p.frechet).collect();
    let rms: Vec<f64> = pairs.iter().map(|p| p.rms).collect();
    Ok(ComparisonReport {
        correspondence_size: pairs.len(),
        procrustes_residual: residual,
        trajectory_deviation: Summary::of(&fr),
        pointwise_rms: Summary::of(&rms),
        pairs,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frechet_of_shifted_line() {
        let p = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]];
        let q: Vec<Vec<f64>> = p.iter().map(|x| vec![x[0], 0.5]).collect();
        assert_eq!(discrete_frechet(&p, &q), 0.5);
        assert_eq!(discrete_frechet(&p, &p), 0.0);
    }

    #[test]
    fn frechet_respects_order() {
        let p = vec![vec![0.0], vec![1.0]];
        let q = vec![vec![1.0], vec![0.0]];
        assert_eq!(discrete_frechet(&p, &q), 1.0);
    }
}

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::christoffel::christoffel;
use super::{GeometryError, MetricField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryKind {
    Geodesic,
    Observed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

/// Sampled curve with velocities; parameter values strictly increase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    // negated so that NaN parameters are rejected
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(kind: TrajectoryKind, samples: Vec<Sample>) -> Result<Self, GeometryError> {
        if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(GeometryError::InvalidParam("parameter values must strictly increase".into()));
        }
        let finite = samples
            .iter()
            .all(|s| s.t.is_finite() && s.x.iter().chain(&s.v).all(|c| c.is_finite()));
        if !finite {
            return Err(GeometryError::InvalidParam("trajectory has non-finite components".into()));
        }
        Ok(Self { kind, samples })
    }

    /// Polyline through `points` at parameters `0, 1, 2, ...` with
    /// velocities from finite differences (one-sided at the ends).
    pub fn observed(points: &[Vec<f64>]) -> Result<Self, GeometryError> {
        let n = points.len();
        let samples = (0..n)
            .map(|i| {
                let (a, b, span) = match (i.checked_sub(1), (i + 1 < n).then_some(i + 1)) {
                    (Some(p), Some(q)) => (p, q, 2.0),
                    (None, Some(q)) => (i, q, 1.0),
                    (Some(p), None) => (p, i, 1.0),
                    (None, None) => (i, i, 1.0),
                };
                let v = points[b].iter().zip(&points[a]).map(|(q, p)| (q - p) / span).collect();
                Sample {
                    t: i as f64,
                    x: points[i].clone(),
                    v,
                }
            })
            .collect();
        Self::new(TrajectoryKind::Observed, samples)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// CSV with columns `t, x0.., v0..`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let m = self.samples.first().map_or(0, |s| s.x.len());
        let mut header = vec!["t".to_string()];
        header.extend((0..m).map(|i| format!("x{i}")));
        header.extend((0..m).map(|i| format!("v{i}")));
        writeln!(out, "{}", header.join(","))?;
        for s in &self.samples {
            let row: Vec<String> = std::iter::once(&s.t)
                .chain(&s.x)
                .chain(&s.v)
                .map(f64::to_string)
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Read the CSV written by [`Trajectory::write_csv`].
    pub fn read_csv<R: BufRead>(input: R, kind: TrajectoryKind) -> Result<Self, GeometryError> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| GeometryError::Format("empty trajectory file".into()))?;
        let cols = header.split(',').count();
        if cols < 1 || cols % 2 == 0 {
            return Err(GeometryError::Format(format!("bad trajectory header {header:?}")));
        }
        let m = (cols - 1) / 2;
        let mut samples = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            let vals: Vec<f64> = line
                .split(',')
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|e| GeometryError::Format(format!("row {}: {e}", i + 2)))?;
            if vals.len() != cols {
                return Err(GeometryError::Format(format!("row {} has {} columns", i + 2, vals.len())));
            }
            samples.push(Sample {
                t: vals[0],
                x: vals[1..1 + m].to_vec(),
                v: vals[1 + m..].to_vec(),
            });
        }
        Self::new(kind, samples)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Reached the end of the parameter span.
    Completed,
    /// The next step would have left the grid interior.
    Boundary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicRun {
    pub trajectory: Trajectory,
    pub stop: StopReason,
}

fn acceleration(field: &MetricField, x: &[f64], v: &[f64]) -> Result<Vec<f64>, GeometryError> {
    let gamma = christoffel(field, x)?;
    Ok(gamma.contract(v).into_iter().map(|a| -a).collect())
}

fn axpy(x: &[f64], a: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(p, q)| p + a * q).collect()
}

enum Step {
    Ok(Vec<f64>, Vec<f64>),
    Boundary,
}

fn rk4_step(field: &MetricField, x: &[f64], v: &[f64], h: f64) -> Result<Step, GeometryError> {
    let acc = |x: &[f64], v: &[f64]| match acceleration(field, x, v) {
        Err(GeometryError::OutsideInterior(_)) => Ok(None),
        Err(e) => Err(e),
        Ok(a) => Ok(Some(a)),
    };
    let Some(a1) = acc(x, v)? else { return Ok(Step::Boundary) };
    let (x2, v2) = (axpy(x, h / 2.0, v), axpy(v, h / 2.0, &a1));
    let Some(a2) = acc(&x2, &v2)? else { return Ok(Step::Boundary) };
    let (x3, v3) = (axpy(x, h / 2.0, &v2), axpy(v, h / 2.0, &a2));
    let Some(a3) = acc(&x3, &v3)? else { return Ok(Step::Boundary) };
    let (x4, v4) = (axpy(x, h, &v3), axpy(v, h, &a3));
    let Some(a4) = acc(&x4, &v4)? else { return Ok(Step::Boundary) };
    let m = x.len();
    let mut xn = Vec::with_capacity(m);
    let mut vn = Vec::with_capacity(m);
    for i in 0..m {
        xn.push(x[i] + h / 6.0 * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]));
        vn.push(v[i] + h / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]));
    }
    if !field.grid().is_interior(&xn) && xn.iter().all(|c| c.is_finite()) {
        return Ok(Step::Boundary);
    }
    Ok(Step::Ok(xn, vn))
}

/// Integrate `ẍ^j = −Γ^j_kl ẋ^k ẋ^l` from `(x0, v0)` over `[0, t_end]` with
/// classical RK4 at step `h`, recording every step. The final step is
/// shortened to land exactly on `t_end`.
///
/// Leaving the grid interior ends the run early with
/// [`StopReason::Boundary`]. A start outside the interior is
/// [`GeometryError::OutsideInterior`]; a first step that already leaves it is
/// [`GeometryError::ImmediateBoundary`].
/// A non-finite state returns [`GeometryError::Diverged`].
pub fn integrate_geodesic(
    field: &MetricField,
    x0: &[f64],
    v0: &[f64],
    t_end: f64,
    h: f64,
) -> Result<GeodesicRun, GeometryError> {
    let m = field.dim();
    if x0.len() != m || v0.len() != m {
        return Err(GeometryError::InvalidParam(format!("x0 and v0 need {m} components")));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(GeometryError::InvalidParam(format!("step h = {h} must be > 0")));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(GeometryError::InvalidParam(format!("T = {t_end} must be > 0")));
    }
    if v0.iter().any(|c| !c.is_finite()) {
        return Err(GeometryError::InvalidParam("v0 must be finite".into()));
    }
    if !field.grid().is_interior(x0) {
        return Err(GeometryError::OutsideInterior(x0.to_vec()));
    }
    let steps = ((t_end / h) - 1e-9).ceil().max(1.0) as usize;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(Sample {
        t: 0.0,
        x: x0.to_vec(),
        v: v0.to_vec(),
    });
    let mut stop = StopReason::Completed;
    for k in 0..steps {
        let t = k as f64 * h;
        let (t_next, dt) = if k + 1 == steps { (t_end, t_end - t) } else { ((k + 1) as f64 * h, h) };
        let last = samples.last().expect("non-empty");
        match rk4_step(field, &last.x, &last.v, dt)? {
            Step::Boundary => {
                stop = StopReason::Boundary;
                break;
            }
            Step::Ok(x, v) => {
                if x.iter().chain(&v).any(|c| !c.is_finite()) {
                    return Err(GeometryError::Diverged {
                        t: t_next,
                        samples: samples.len(),
                    });
                }
                samples.push(Sample { t: t_next, x, v });
            }
        }
    }
    if samples.len() < 2 {
        return Err(GeometryError::ImmediateBoundary(x0.to_vec()));
    }
    Ok(GeodesicRun {
        trajectory: Trajectory {
            kind: TrajectoryKind::Geodesic,
            samples,
        },
        stop,
    })
}

//! Locally weighted least-squares fit of a metric field to embedded edges.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{GeometryError, Grid, Interpolation, MetricField};
use crate::skeleton::EmbeddedSpace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitOptions {
    /// Nodes per spatial axis; the temporal axis gets one node per layer.
    pub nodes_per_axis: usize,
    /// Ridge weight pulling each node towards the identity, relative to the
    /// mean diagonal of the node's normal matrix.
    pub lambda: f64,
    /// Eigenvalue floor as a fraction of the median eigenvalue over all nodes.
    pub eps_pd: f64,
    #[serde(default)]
    pub interpolation: Interpolation,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            nodes_per_axis: 32,
            lambda: 1e-3,
            eps_pd: 1e-4,
            interpolation: Interpolation::Cubic,
        }
    }
}

impl FitOptions {
    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.nodes_per_axis < 4 {
            return Err(GeometryError::InvalidParam(format!(
                "grid.nodes_per_axis = {} must be >= 4",
                self.nodes_per_axis
            )));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(GeometryError::InvalidParam(format!("grid.lambda = {} must be >= 0", self.lambda)));
        }
        if !(self.eps_pd.is_finite() && self.eps_pd > 0.0 && self.eps_pd < 1.0) {
            return Err(GeometryError::InvalidParam(format!(
                "grid.eps_pd = {} must lie in (0, 1)",
                self.eps_pd
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeFit {
    Fitted,
    /// No edge within reach; the identity was used.
    Empty,
    /// The normal equations were singular; the identity was used.
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub nodes: usize,
    pub fitted: usize,
    pub empty: usize,
    pub fallback: usize,
    /// Nodes whose eigenvalues were raised to the floor.
    pub floored: usize,
    pub edges: usize,
    /// Absolute eigenvalue floor that was applied.
    pub eps_pd: f64,
    pub median_eigenvalue: f64,
    pub min_eigenvalue: f64,
    pub fallback_nodes: Vec<usize>,
}

struct Edge {
    mid: Vec<f64>,
    delta: Vec<f64>,
    d2: f64,
}

/// Grid over the embedded points: spatial axes span the bounding box with
/// one cell of margin, the temporal axis has one node per layer.
pub fn grid_for_space(space: &EmbeddedSpace, nodes_per_axis: usize) -> Result<Grid, GeometryError> {
    let m = space.dim();
    let n = space.n;
    let mut origin = Vec::with_capacity(m);
    let mut spacing = Vec::with_capacity(m);
    let mut nodes = Vec::with_capacity(m);
    for a in 0..n {
        let (lo, hi) = space
            .points
            .iter()
            .map(|p| p.coords[a])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), c| (l.min(c), h.max(c)));
        let (lo, hi) = if lo.is_finite() && hi > lo { (lo, hi) } else { (lo.min(0.0) - 0.5, lo.max(0.0) + 0.5) };
        let h = (hi - lo) / (nodes_per_axis - 3) as f64;
        origin.push(lo - h);
        spacing.push(h);
        nodes.push(nodes_per_axis);
    }
    origin.push(-1.0);
    spacing.push(1.0);
    nodes.push((space.num_layers() + 2).max(4));
    Grid::new(origin, spacing, nodes)
}

fn collect_edges(space: &EmbeddedSpace) -> Vec<Edge> {
    let pairs = space
        .thread_edges
        .iter()
        .map(|e| (e.from, e.to, e.dist))
        .chain(space.knn_edges.iter().map(|e| (e.a, e.b, e.dist)));
    pairs
        .filter_map(|(a, b, d)| {
            let (xa, xb) = (space.coord(a)?, space.coord(b)?);
            Some(Edge {
                mid: xa.iter().zip(xb).map(|(p, q)| 0.5 * (p + q)).collect(),
                delta: xb.iter().zip(xa).map(|(q, p)| q - p).collect(),
                d2: d * d,
            })
        })
        .filter(|e| e.d2.is_finite())
        .collect()
}

/// Fit a symmetric metric at every grid node so that `Δxᵀ G Δx ≈ d²` over
/// nearby edges, then floor eigenvalues to keep every node positive definite.
pub fn fit_metric_field(space: &EmbeddedSpace, opts: &FitOptions) -> Result<(MetricField, FitReport), GeometryError> {
    opts.validate()?;
    let edges = collect_edges(space);
    if edges.is_empty() {
        return Err(GeometryError::InvalidParam("space has no edges with distances".into()));
    }
    let grid = grid_for_space(space, opts.nodes_per_axis)?;
    let m = grid.dim();
    let p = m * (m + 1) / 2;
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
    let bandwidth: Vec<f64> = grid.spacing.iter().map(|h| 2.0 * h).collect();
    let identity_params: Vec<f64> = pairs.iter().map(|&(i, j)| if i == j { 1.0 } else { 0.0 }).collect();

    let features: Vec<Vec<f64>> = edges
        .iter()
        .map(|e| {
            pairs
                .iter()
                .map(|&(i, j)| if i == j { e.delta[i] * e.delta[i] } else { 2.0 * e.delta[i] * e.delta[j] })
                .collect()
        })
        .collect();

    let mut samples = Vec::with_capacity(grid.num_nodes() * m * m);
    let mut status = Vec::with_capacity(grid.num_nodes());
    for node in 0..grid.num_nodes() {
        let c = grid.node_coords(node);
        let mut ata = DMatrix::<f64>::zeros(p, p);
        let mut atb = DVector::<f64>::zeros(p);
        let mut any = false;
        for (e, f) in edges.iter().zip(&features) {
            let mut z2 = 0.0;
            let mut near = true;
            for a in 0..m {
                let z = (e.mid[a] - c[a]) / bandwidth[a];
                if z.abs() > 3.0 {
                    near = false;
                    break;
                }
                z2 += z * z;
            }
            if !near {
                continue;
            }
            any = true;
            let w = (-0.5 * z2).exp();
            for r in 0..p {
                atb[r] += w * f[r] * e.d2;
                for s in r..p {
                    ata[(r, s)] += w * f[r] * f[s];
                }
            }
        }
        let params = if any {
            for r in 0..p {
                for s in 0..r {
                    ata[(r, s)] = ata[(s, r)];
                }
            }
            let lam = opts.lambda * ata.trace() / p as f64;
            for (r, &(i, j)) in pairs.iter().enumerate() {
                let d = if i == j { 1.0 } else { 2.0 };
                ata[(r, r)] += lam * d;
                atb[r] += lam * d * identity_params[r];
            }
            match ata.cholesky() {
                Some(ch) => {
                    let sol = ch.solve(&atb);
                    if sol.iter().all(|v| v.is_finite()) {
                        status.push(NodeFit::Fitted);
                        sol.iter().copied().collect()
                    } else {
                        status.push(NodeFit::Fallback);
                        identity_params.clone()
                    }
                }
                None => {
                    status.push(NodeFit::Fallback);
                    identity_params.clone()
                }
            }
        } else {
            status.push(NodeFit::Empty);
            identity_params.clone()
        };
        let mut g = DMatrix::<f64>::zeros(m, m);
        for (&(i, j), v) in pairs.iter().zip(&params) {
            g[(i, j)] = *v;
            g[(j, i)] = *v;
        }
        samples.extend(g.iter().copied());
    }

    // Eigenvalue floor relative to the median eigenvalue over all nodes.
    let mut eigs: Vec<Vec<f64>> = Vec::with_capacity(grid.num_nodes());
    for node in 0..grid.num_nodes() {
        let g = DMatrix::from_column_slice(m, m, &samples[node * m * m..(node + 1) * m * m]);
        eigs.push(g.symmetric_eigenvalues().iter().copied().collect());
    }
    let mut positive: Vec<f64> = eigs.iter().flatten().copied().filter(|v| *v > 0.0).collect();
    positive.sort_by(f64::total_cmp);
    let median = if positive.is_empty() { 1.0 } else { positive[positive.len() / 2] };
    let eps = opts.eps_pd * median;
    let target = eps * (1.0 + 1e-8);
    let mut floored = 0;
    for node in 0..grid.num_nodes() {
        if eigs[node].iter().all(|&v| v >= target) {
            continue;
        }
        floored += 1;
        let g = DMatrix::from_column_slice(m, m, &samples[node * m * m..(node + 1) * m * m]);
        let se = g.symmetric_eigen();
        let lam = DMatrix::from_diagonal(&se.eigenvalues.map(|v| v.max(target)));
        let fixed = &se.eigenvectors * lam * se.eigenvectors.transpose();
        let fixed = 0.5 * (&fixed + fixed.transpose());
        samples[node * m * m..(node + 1) * m * m].copy_from_slice(fixed.as_slice());
    }

    let field = MetricField::from_samples(grid, samples, opts.interpolation, eps)?;
    let min_eigenvalue = (0..field.grid().num_nodes())
        .map(|i| field.node_metric(i).symmetric_eigenvalues().min())
        .fold(f64::INFINITY, f64::min);
    let count = |s: NodeFit| status.iter().filter(|&&x| x == s).count();
    let report = FitReport {
        nodes: status.len(),
        fitted: count(NodeFit::Fitted),
        empty: count(NodeFit::Empty),
        fallback: count(NodeFit::Fallback),
        floored,
        edges: edges.len(),
        eps_pd: eps,
        median_eigenvalue: median,
        min_eigenvalue,
        fallback_nodes: status
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == NodeFit::Fallback)
            .map(|(i, _)| i)
            .collect(),
    };
    Ok((field, report))
}

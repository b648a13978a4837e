//! Grid-sampled metric tensor fields.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{GeometryError, Grid};

/// How the metric is reconstructed between grid nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Tensor-product Catmull-Rom cubic. The field is C1 and its derivatives
    /// are taken analytically from the interpolant; at grid nodes they equal
    /// central differences at the grid spacing.
    #[default]
    Cubic,
    /// Tensor-product linear. Derivatives are central differences of the
    /// interpolant at the grid spacing.
    Multilinear,
}

/// Metric value and its partial derivatives at a point.
#[derive(Debug, Clone)]
pub struct MetricEval {
    pub g: DMatrix<f64>,
    /// `dg[a]` is the derivative along axis `a`.
    pub dg: Vec<DMatrix<f64>>,
}

/// Symmetric positive-definite `m x m` matrices sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    grid: Grid,
    /// Per node, the full row-major `m x m` matrix.
    samples: Vec<f64>,
    interpolation: Interpolation,
    eps_pd: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum FieldLine {
    Header {
        dim: usize,
        origin: Vec<f64>,
        spacing: Vec<f64>,
        nodes: Vec<usize>,
        interpolation: Interpolation,
        eps_pd: f64,
    },
    Node {
        index: usize,
        coords: Vec<f64>,
        /// Row-major upper triangle.
        g: Vec<f64>,
    },
}

impl MetricField {
    /// Build from per-node matrices (each row-major `m x m`).
    pub fn from_samples(
        grid: Grid,
        samples: Vec<f64>,
        interpolation: Interpolation,
        eps_pd: f64,
    ) -> Result<Self, GeometryError> {
        let m = grid.dim();
        if samples.len() != grid.num_nodes() * m * m {
            return Err(GeometryError::InvalidParam(format!(
                "expected {} metric entries, got {}",
                grid.num_nodes() * m * m,
                samples.len()
            )));
        }
        if interpolation == Interpolation::Cubic && grid.nodes.iter().any(|&n| n < 4) {
            return Err(GeometryError::InvalidParam(
                "cubic interpolation needs >= 4 nodes per axis".into(),
            ));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::InvalidParam("non-finite metric sample".into()));
        }
        Ok(Self {
            grid,
            samples,
            interpolation,
            eps_pd,
        })
    }

    /// Sample an analytic metric at every node.
    pub fn from_fn(
        grid: Grid,
        interpolation: Interpolation,
        f: impl Fn(&[f64]) -> DMatrix<f64>,
    ) -> Result<Self, GeometryError> {
        let m = grid.dim();
        let mut samples = Vec::with_capacity(grid.num_nodes() * m * m);
        for node in 0..grid.num_nodes() {
            let g = f(&grid.node_coords(node));
            for i in 0..m {
                for j in 0..m {
                    samples.push(g[(i, j)]);
                }
            }
        }
        Self::from_samples(grid, samples, interpolation, 0.0)
    }

    pub fn constant(grid: Grid, g: &DMatrix<f64>, interpolation: Interpolation) -> Result<Self, GeometryError> {
        let g = g.clone();
        Self::from_fn(grid, interpolation, move |_| g.clone())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    /// Eigenvalue floor applied when the field was fitted (0 for analytic fields).
    pub fn eps_pd(&self) -> f64 {
        self.eps_pd
    }

    pub fn node_metric(&self, node: usize) -> DMatrix<f64> {
        let m = self.dim();
        DMatrix::from_row_slice(m, m, &self.samples[node * m * m..(node + 1) * m * m])
    }

    fn sample(&self, node: usize, entry: usize) -> f64 {
        let m = self.dim();
        self.samples[node * m * m + entry]
    }

    fn check_interior(&self, x: &[f64]) -> Result<(), GeometryError> {
        if self.grid.is_interior(x) {
            Ok(())
        } else {
            Err(GeometryError::OutsideInterior(x.to_vec()))
        }
    }

    /// Interpolated metric at `x`; `x` must be in the grid interior.
    pub fn metric_at(&self, x: &[f64]) -> Result<DMatrix<f64>, GeometryError> {
        self.check_interior(x)?;
        Ok(self.interpolate(x, None))
    }

    /// Metric and its partial derivatives at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<MetricEval, GeometryError> {
        self.check_interior(x)?;
        let m = self.dim();
        let g = self.interpolate(x, None);
        let dg = match self.interpolation {
            Interpolation::Cubic => (0..m).map(|a| self.interpolate(x, Some(a))).collect(),
            Interpolation::Multilinear => (0..m)
                .map(|a| {
                    let h = self.grid.spacing[a];
                    let mut xp = x.to_vec();
                    let mut xm = x.to_vec();
                    xp[a] += h;
                    xm[a] -= h;
                    (self.interpolate(&xp, None) - self.interpolate(&xm, None)) / (2.0 * h)
                })
                .collect(),
        };
        Ok(MetricEval { g, dg })
    }

    /// Tensor-product interpolation of the value, or of the derivative along
    /// `deriv` when given. Contributions are accumulated as differences to a
    /// reference node so that constant data reproduce exactly and data that
    /// do not vary along `deriv` give an exactly zero derivative.
    fn interpolate(&self, x: &[f64], deriv: Option<usize>) -> DMatrix<f64> {
        let m = self.dim();
        let stencil: usize = match self.interpolation {
            Interpolation::Cubic => 4,
            Interpolation::Multilinear => 2,
        };
        let mut base = Vec::with_capacity(m);
        let mut weights: Vec<[f64; 4]> = Vec::with_capacity(m);
        for a in 0..m {
            let n = self.grid.nodes[a];
            let h = self.grid.spacing[a];
            let u = (x[a] - self.grid.origin[a]) / h;
            let (lo_cell, hi_cell) = match self.interpolation {
                Interpolation::Cubic => (1, n - 3),
                Interpolation::Multilinear => (0, n - 2),
            };
            let cell = (u.floor().max(0.0) as usize).clamp(lo_cell, hi_cell);
            let s = u - cell as f64;
            let w = match (self.interpolation, deriv == Some(a)) {
                (Interpolation::Cubic, false) => catmull_rom(s),
                (Interpolation::Cubic, true) => catmull_rom_deriv(s).map(|v| v / h),
                (Interpolation::Multilinear, false) => [1.0 - s, s, 0.0, 0.0],
                (Interpolation::Multilinear, true) => [-1.0 / h, 1.0 / h, 0.0, 0.0],
            };
            let first = match self.interpolation {
                Interpolation::Cubic => cell - 1,
                Interpolation::Multilinear => cell,
            };
            base.push(first);
            weights.push(w);
        }

        let corners = stencil.pow(m as u32);
        let mut idx = vec![0usize; m];
        let mut out = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let entry = i * m + j;
                let mut acc = 0.0;
                for c in 0..corners {
                    let mut rem = c;
                    let mut w = 1.0;
                    for a in (0..m).rev() {
                        let k = rem % stencil;
                        rem /= stencil;
                        idx[a] = base[a] + k;
                        w *= weights[a][k];
                    }
                    if w == 0.0 {
                        continue;
                    }
                    let node = self.grid.flat_index(&idx);
                    let value = self.sample(node, entry);
                    let reference = match deriv {
                        Some(a) => {
                            let keep = idx[a];
                            idx[a] = base[a];
                            let r = self.sample(self.grid.flat_index(&idx), entry);
                            idx[a] = keep;
                            r
                        }
                        None => self.sample(self.grid.flat_index(&base), entry),
                    };
                    acc += w * (value - reference);
                }
                if deriv.is_none() {
                    acc += self.sample(self.grid.flat_index(&base), entry);
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc;
            }
        }
        out
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let m = self.dim();
        let header = FieldLine::Header {
            dim: m,
            origin: self.grid.origin.clone(),
            spacing: self.grid.spacing.clone(),
            nodes: self.grid.nodes.clone(),
            interpolation: self.interpolation,
            eps_pd: self.eps_pd,
        };
        writeln!(out, "{}", serde_json::to_string(&header).map_err(std::io::Error::other)?)?;
        for node in 0..self.grid.num_nodes() {
            let mut upper = Vec::with_capacity(m * (m + 1) / 2);
            for i in 0..m {
                for j in i..m {
                    upper.push(self.sample(node, i * m + j));
                }
            }
            let line = FieldLine::Node {
                index: node,
                coords: self.grid.node_coords(node),
                g: upper,
            };
            writeln!(out, "{}", serde_json::to_string(&line).map_err(std::io::Error::other)?)?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self, GeometryError> {
        let mut lines = input.lines();
        let first = lines
            .next()
            .ok_or_else(|| GeometryError::Format("empty metric file".into()))??;
        let FieldLine::Header {
            dim,
            origin,
            spacing,
            nodes,
            interpolation,
            eps_pd,
        } = serde_json::from_str(&first).map_err(|e| GeometryError::Format(e.to_string()))?
        else {
            return Err(GeometryError::Format("first line must be the header".into()));
        };
        let grid = Grid::new(origin, spacing, nodes)?;
        if grid.dim() != dim {
            return Err(GeometryError::Format("header dim disagrees with grid".into()));
        }
        let mut samples = vec![f64::NAN; grid.num_nodes() * dim * dim];
        let mut seen = 0usize;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let FieldLine::Node { index, g, .. } =
                serde_json::from_str(&line).map_err(|e| GeometryError::Format(e.to_string()))?
            else {
                return Err(GeometryError::Format("duplicate header".into()));
            };
            if index >= grid.num_nodes() || g.len() != dim * (dim + 1) / 2 {
                return Err(GeometryError::Format(format!("bad node line {index}")));
            }
            let mut it = g.into_iter();
            for i in 0..dim {
                for j in i..dim {
                    let v = it.next().expect("length checked");
                    samples[index * dim * dim + i * dim + j] = v;
                    samples[index * dim * dim + j * dim + i] = v;
                }
            }
            seen += 1;
        }
        if seen != grid.num_nodes() {
            return Err(GeometryError::Format(format!(
                "expected {} nodes, found {seen}",
                grid.num_nodes()
            )));
        }
        Self::from_samples(grid, samples, interpolation, eps_pd)
    }
}

fn catmull_rom(s: f64) -> [f64; 4] {
    let s2 = s * s;
    let s3 = s2 * s;
    [
        0.5 * (-s3 + 2.0 * s2 - s),
        0.5 * (3.0 * s3 - 5.0 * s2 + 2.0),
        0.5 * (-3.0 * s3 + 4.0 * s2 + s),
        0.5 * (s3 - s2),
    ]
}

fn catmull_rom_deriv(s: f64) -> [f64; 4] {
    let s2 = s * s;
    [
        0.5 * (-3.0 * s2 + 4.0 * s - 1.0),
        0.5 * (9.0 * s2 - 10.0 * s),
        0.5 * (-9.0 * s2 + 8.0 * s + 1.0),
        0.5 * (3.0 * s2 - 2.0 * s),
    ]
}

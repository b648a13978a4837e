use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Rectilinear grid: node `i` on axis `a` sits at `origin[a] + i * spacing[a]`.
/// Flat node indices are row-major with the last axis varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub nodes: Vec<usize>,
}

impl Grid {
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, nodes: Vec<usize>) -> Result<Self, GeometryError> {
        if origin.len() != spacing.len() || origin.len() != nodes.len() || origin.is_empty() {
            return Err(GeometryError::InvalidParam("grid axes disagree in count".into()));
        }
        if spacing.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(GeometryError::InvalidParam("grid spacing must be positive".into()));
        }
        if nodes.iter().any(|&n| n < 2) || origin.iter().any(|o| !o.is_finite()) {
            return Err(GeometryError::InvalidParam("every grid axis needs >= 2 nodes".into()));
        }
        Ok(Self {
            origin,
            spacing,
            nodes,
        })
    }

    /// Grid over `[lo, hi]` on every axis with `count` nodes per axis.
    pub fn uniform(lo: &[f64], hi: &[f64], count: &[usize]) -> Result<Self, GeometryError> {
        let spacing = lo
            .iter()
            .zip(hi)
            .zip(count)
            .map(|((l, h), &c)| (h - l) / (c.max(2) - 1) as f64)
            .collect();
        Self::new(lo.to_vec(), spacing, count.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.iter().product()
    }

    pub fn axis_coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.spacing[axis]
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = flat % self.nodes[a];
            flat /= self.nodes[a];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.nodes)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn node_coords(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.axis_coord(a, i))
            .collect()
    }

    /// Inside the box that keeps one cell of margin to every boundary.
    pub fn is_interior(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && (0..self.dim()).all(|a| {
                let lo = self.axis_coord(a, 1);
                let hi = self.axis_coord(a, self.nodes[a] - 2);
                x[a].is_finite() && x[a] >= lo && x[a] <= hi
            })
    }

    /// Whether a node has no boundary index on any axis.
    pub fn is_interior_node(&self, idx: &[usize]) -> bool {
        idx.iter().zip(&self.nodes).all(|(&i, &n)| i >= 1 && i + 2 <= n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        let g = Grid::uniform(&[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0], &[3, 4, 5]).unwrap();
        assert_eq!(g.num_nodes(), 60);
        for f in 0..60 {
            assert_eq!(g.flat_index(&g.multi_index(f)), f);
        }
        assert_eq!(g.node_coords(g.flat_index(&[2, 3, 4])), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn interior_has_one_cell_margin() {
        let g = Grid::uniform(&[0.0], &[4.0], &[5]).unwrap();
        assert!(g.is_interior(&[1.0]));
        assert!(g.is_interior(&[3.0]));
        assert!(!g.is_interior(&[0.5]));
        assert!(!g.is_interior(&[3.5]));
        assert!(!g.is_interior(&[f64::NAN]));
    }
}

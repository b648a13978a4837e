use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::metricspace::{LayeredPreSpace, PointId, ThreadEdge};

/// Within-layer nearest-neighbour edge, stored once with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnnEdge {
    pub a: PointId,
    pub b: PointId,
    pub dist: f64,
}

/// Threads plus nearest-neighbour bones plus simplex cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skeleton {
    pub k: usize,
    /// All points, ordered by layer then stream.
    pub points: Vec<PointId>,
    pub thread_edges: Vec<ThreadEdge>,
    pub knn_edges: Vec<KnnEdge>,
    /// Each point's same-layer neighbours, nearest first (ties by id), at most `k`.
    pub neighbors: Vec<(PointId, Vec<PointId>)>,
    /// Point sets of `n + 1` same-layer points, each sorted ascending.
    pub cells: Vec<Vec<PointId>>,
}

impl Skeleton {
    pub fn neighbors_of(&self, p: PointId) -> &[PointId] {
        self.neighbors
            .binary_search_by(|(q, _)| q.cmp(&p))
            .map(|i| self.neighbors[i].1.as_slice())
            .unwrap_or(&[])
    }
}

/// Default neighbour count for spatial dimension `n`: `max(3, n + 1)`.
pub fn default_k(n: usize) -> usize {
    3.max(n + 1)
}

/// Link every point to its `k` nearest same-layer points.
///
/// Neighbour order is by pre-space distance with ties broken by ascending
/// point id. The edge set is the union over both directions.
pub fn link_nearest_neighbors(prespace: &LayeredPreSpace, k: usize) -> Skeleton {
    let k = k.max(1);
    let mut neighbors = Vec::new();
    let mut edges: BTreeMap<(PointId, PointId), f64> = BTreeMap::new();
    let mut points = Vec::new();
    for layer in &prespace.layers {
        let n = layer.len();
        for i in 0..n {
            points.push(layer.points[i]);
            let mut cand: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            cand.sort_by(|&x, &y| {
                layer
                    .get(i, x)
                    .total_cmp(&layer.get(i, y))
                    .then(layer.points[x].cmp(&layer.points[y]))
            });
            cand.truncate(k);
            for &j in &cand {
                let (a, b) = order(layer.points[i], layer.points[j]);
                edges.insert((a, b), layer.get(i, j));
            }
            neighbors.push((layer.points[i], cand.iter().map(|&j| layer.points[j]).collect()));
        }
    }
    neighbors.sort_by_key(|(p, _)| *p);
    Skeleton {
        k,
        points,
        thread_edges: prespace.thread_edges.clone(),
        knn_edges: edges
            .into_iter()
            .map(|((a, b), dist)| KnnEdge { a, b, dist })
            .collect(),
        neighbors,
        cells: Vec::new(),
    }
}

fn order(a: PointId, b: PointId) -> (PointId, PointId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// One cell per point: the point plus its `n` nearest neighbours. Points with
/// fewer than `n` recorded neighbours produce no cell; identical point sets
/// are stored once. Cells are therefore limited by the skeleton's `k`.
pub fn form_simplices(mut skeleton: Skeleton, n: usize) -> Skeleton {
    let n = n.max(1);
    let mut cells: BTreeSet<Vec<PointId>> = BTreeSet::new();
    for (p, nb) in &skeleton.neighbors {
        if nb.len() < n {
            continue;
        }
        let mut cell: Vec<PointId> = std::iter::once(*p).chain(nb[..n].iter().copied()).collect();
        cell.sort();
        cells.insert(cell);
    }
    skeleton.cells = cells.into_iter().collect();
    skeleton
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metricspace::Layer;

    fn space(layers: Vec<Vec<f64>>) -> LayeredPreSpace {
        let layers = layers
            .into_iter()
            .enumerate()
            .map(|(t, dist)| {
                let n = (dist.len() as f64).sqrt() as usize;
                Layer {
                    points: (0..n).map(|s| PointId::new(s, t)).collect(),
                    dist,
                }
            })
            .collect();
        LayeredPreSpace {
            stream_ids: vec![],
            layers,
            thread_edges: vec![],
        }
    }

    fn pairs(s: &Skeleton) -> Vec<(u32, u32)> {
        s.knn_edges.iter().map(|e| (e.a.stream, e.b.stream)).collect()
    }

    #[test]
    fn collinear_nearest_neighbours() {
        let ps = space(vec![vec![0., 1., 2., 1., 0., 1., 2., 1., 0.]]);
        let s = link_nearest_neighbors(&ps, 1);
        assert_eq!(pairs(&s), vec![(0, 1), (1, 2)]);
        // The middle point's tie goes to the smaller id.
        assert_eq!(s.neighbors_of(PointId::new(1, 0)), &[PointId::new(0, 0)]);
    }

    #[test]
    fn singleton_layer_has_no_edges() {
        let ps = space(vec![vec![0.0]]);
        let s = link_nearest_neighbors(&ps, 3);
        assert!(s.knn_edges.is_empty());
    }

    #[test]
    fn saturated_k_is_complete() {
        let d = vec![0., 1., 2., 3., 1., 0., 4., 5., 2., 4., 0., 6., 3., 5., 6., 0.];
        let s = link_nearest_neighbors(&space(vec![d]), 3);
        assert_eq!(s.knn_edges.len(), 6);
    }

    #[test]
    fn triangle_cell_is_deduplicated() {
        let ps = space(vec![vec![0., 1., 1., 1., 0., 1., 1., 1., 0.]]);
        let s = form_simplices(link_nearest_neighbors(&ps, 3), 2);
        assert_eq!(s.cells.len(), 1);
        assert_eq!(s.cells[0].len(), 3);
    }

    #[test]
    fn two_point_layer_has_no_triangles() {
        let ps = space(vec![vec![0., 1., 1., 0.]]);
        let s = form_simplices(link_nearest_neighbors(&ps, 3), 2);
        assert!(s.cells.is_empty());
    }

    #[test]
    fn one_dimensional_cells_are_nearest_pairs() {
        let ps = space(vec![vec![0., 1., 2., 1., 0., 1., 2., 1., 0.]]);
        let s = form_simplices(link_nearest_neighbors(&ps, 1), 1);
        let cells: Vec<_> = s.cells.iter().map(|c| (c[0].stream, c[1].stream)).collect();
        assert_eq!(cells, vec![(0, 1), (1, 2)]);
    }
}

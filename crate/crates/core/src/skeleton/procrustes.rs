//! Orthogonal Procrustes alignment of paired point sets.

use nalgebra::{DMatrix, DVector};

/// `x -> rotation * x + translation`.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidTransform {
    pub rotation: DMatrix<f64>,
    pub translation: DVector<f64>,
}

impl RigidTransform {
    pub fn identity(dim: usize) -> Self {
        Self {
            rotation: DMatrix::identity(dim, dim),
            translation: DVector::zeros(dim),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let v = &self.rotation * DVector::from_column_slice(x) + &self.translation;
        v.iter().copied().collect()
    }
}

/// Rigid transform minimising `sum |R s_i + t - d_i|^2`.
///
/// With `allow_reflection` the rotation may have determinant -1. Both sets
/// must have the same length and dimension; an empty set yields the identity.
pub fn rigid_align(source: &[Vec<f64>], target: &[Vec<f64>], allow_reflection: bool) -> RigidTransform {
    assert_eq!(source.len(), target.len(), "paired point sets differ in size");
    let dim = source.first().or(target.first()).map_or(0, Vec::len);
    if source.is_empty() || dim == 0 {
        return RigidTransform::identity(dim);
    }
    let cs = centroid(source, dim);
    let ct = centroid(target, dim);
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for (s, t) in source.iter().zip(target) {
        for i in 0..dim {
            for j in 0..dim {
                h[(i, j)] += (s[i] - cs[i]) * (t[j] - ct[j]);
            }
        }
    }
    let svd = h.svd(true, true);
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    let mut v = v_t.transpose();
    let mut r = &v * u.transpose();
    if !allow_reflection && r.determinant() < 0.0 {
        // Flip the axis belonging to the smallest singular value.
        let idx = svd.singular_values.imin();
        v.column_mut(idx).neg_mut();
        r = &v * u.transpose();
    }
    let translation = &ct - &r * &cs;
    RigidTransform {
        rotation: r,
        translation,
    }
}

fn centroid(points: &[Vec<f64>], dim: usize) -> DVector<f64> {
    let mut c = DVector::zeros(dim);
    for p in points {
        for i in 0..dim {
            c[i] += p[i];
        }
    }
    c / points.len() as f64
}

/// Root-mean-square distance between paired points.
pub fn rms_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let ss: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>())
        .sum();
    (ss / a.len() as f64).sqrt()
}

/// Residual RMS after optimally aligning `source` onto `target`.
pub fn procrustes_residual(source: &[Vec<f64>], target: &[Vec<f64>], allow_reflection: bool) -> f64 {
    let tf = rigid_align(source, target, allow_reflection);
    let moved: Vec<Vec<f64>> = source.iter().map(|s| tf.apply(s)).collect();
    rms_distance(&moved, target)
}

use nalgebra::DMatrix;

use super::{GeometryError, MetricField};

/// `Γ^j_kl` at one point, stored as `gamma[j * m * m + k * m + l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelTensor {
    pub dim: usize,
    pub gamma: Vec<f64>,
}

impl ChristoffelTensor {
    pub fn get(&self, j: usize, k: usize, l: usize) -> f64 {
        let m = self.dim;
        self.gamma[j * m * m + k * m + l]
    }

    /// `a^j = Γ^j_kl v^k v^l`.
    pub fn contract(&self, v: &[f64]) -> Vec<f64> {
        let m = self.dim;
        (0..m)
            .map(|j| {
                let block = &self.gamma[j * m * m..(j + 1) * m * m];
                let mut acc = 0.0;
                for k in 0..m {
                    let row = &block[k * m..(k + 1) * m];
                    let inner: f64 = row.iter().zip(v).map(|(g, vl)| g * vl).sum();
                    acc += v[k] * inner;
                }
                acc
            })
            .collect()
    }
}

/// Christoffel symbols of the second kind of the interpolated metric.
pub fn christoffel(field: &MetricField, x: &[f64]) -> Result<ChristoffelTensor, GeometryError> {
    let m = field.dim();
    if x.len() != m {
        return Err(GeometryError::InvalidParam(format!(
            "point has {} coordinates, field has {m}",
            x.len()
        )));
    }
    let e = field.eval(x)?;
    // First kind: [kl, i] = ½ (∂_k g_il + ∂_l g_ik − ∂_i g_kl).
    let mut first = DMatrix::zeros(m, m * m);
    for i in 0..m {
        for k in 0..m {
            for l in k..m {
                let v = 0.5 * (e.dg[k][(i, l)] + e.dg[l][(i, k)] - e.dg[i][(k, l)]);
                first[(i, k * m + l)] = v;
                first[(i, l * m + k)] = v;
            }
        }
    }
    let lu = e.g.clone().lu();
    let second = lu
        .solve(&first)
        .filter(|s| s.iter().all(|v| v.is_finite()))
        .ok_or_else(|| GeometryError::NotPositiveDefinite(x.to_vec()))?;
    let mut gamma = vec![0.0; m * m * m];
    for j in 0..m {
        for k in 0..m {
            for l in k..m {
                let v = second[(j, k * m + l)];
                gamma[j * m * m + k * m + l] = v;
                gamma[j * m * m + l * m + k] = v;
            }
        }
    }
    Ok(ChristoffelTensor { dim: m, gamma })
}

//! Metric multidimensional scaling: classical (spectral) initialisation
//! followed by stress majorization (Guttman transform iterations).

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Relative eigen-gap below which the spectral start is considered ambiguous.
const SPECTRAL_GAP_TOL: f64 = 1e-9;
/// Random restarts used when the spectral start is ambiguous.
const RANDOM_RESTARTS: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdsOptions {
    pub max_iters: usize,
    /// Stop when the relative stress decrease of one iteration falls below this.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for MdsOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            tolerance: 1e-10,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdsResult {
    /// Row-major `points x dim` configuration, centred at the origin.
    pub coords: Vec<f64>,
    pub dim: usize,
    /// Normalized stress before the first iteration and after every accepted one.
    pub stress_history: Vec<f64>,
    pub converged: bool,
    /// True when the spectral start was ambiguous and random starts were used.
    pub random_start: bool,
}

impl MdsResult {
    pub fn stress(&self) -> f64 {
        *self.stress_history.last().unwrap_or(&0.0)
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }
}

/// Normalized stress `sum (d_ij - |x_i - x_j|)^2 / sum d_ij^2` over `i < j`.
///
/// When every target distance is zero the raw numerator is returned.
pub fn normalized_stress(dist: &[f64], coords: &[f64], dim: usize) -> f64 {
    let n = coords.len() / dim.max(1);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist[i * n + j];
            let e = euclid(&coords[i * dim..(i + 1) * dim], &coords[j * dim..(j + 1) * dim]);
            num += (d - e) * (d - e);
            den += d * d;
        }
    }
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Classical scaling. Returns `None` when the `dim`-th and `dim+1`-th
/// eigenvalues of the double-centred matrix coincide, which leaves the
/// projection undetermined.
pub fn classical_mds(dist: &[f64], n: usize, dim: usize) -> Option<Vec<f64>> {
    if n == 0 {
        return Some(Vec::new());
    }
    let d2 = DMatrix::from_fn(n, n, |i, j| dist[i * n + j] * dist[i * n + j]);
    let row_mean: Vec<f64> = (0..n).map(|i| d2.row(i).mean()).collect();
    let total = d2.mean();
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (d2[(i, j)] - row_mean[i] - row_mean[j] + total));
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &c| eig.eigenvalues[c].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&c)));
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if dim < n && scale > 0.0 {
        let gap = eig.eigenvalues[order[dim - 1]] - eig.eigenvalues[order[dim]];
        if gap <= SPECTRAL_GAP_TOL * scale {
            return None;
        }
    }
    if scale == 0.0 && n > 1 {
        return None;
    }
    let mut coords = vec![0.0; n * dim];
    for (c, &k) in order.iter().take(dim).enumerate() {
        let lambda = eig.eigenvalues[k].max(0.0).sqrt();
        // Fix the sign so the largest-magnitude component is positive.
        let col = eig.eigenvectors.column(k);
        let pivot = col.iter().fold(0.0f64, |m, v| if v.abs() > m.abs() { *v } else { m });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            coords[i * dim + c] = sign * col[i] * lambda;
        }
    }
    Some(coords)
}

/// One Guttman transform `X <- B(X) X / n`.
fn guttman(dist: &[f64], x: &[f64], n: usize, dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * dim];
    for i in 0..n {
        let xi = &x[i * dim..(i + 1) * dim];
        let mut diag = 0.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let xj = &x[j * dim..(j + 1) * dim];
            let e = euclid(xi, xj);
            if e > 0.0 {
                let bij = -dist[i * n + j] / e;
                diag -= bij;
                for c in 0..dim {
                    out[i * dim + c] += bij * xj[c];
                }
            }
        }
        for c in 0..dim {
            out[i * dim + c] += diag * xi[c];
            out[i * dim + c] /= n as f64;
        }
    }
    out
}

fn center(x: &mut [f64], n: usize, dim: usize) {
    if n == 0 {
        return;
    }
    for c in 0..dim {
        let m = (0..n).map(|i| x[i * dim + c]).sum::<f64>() / n as f64;
        for i in 0..n {
            x[i * dim + c] -= m;
        }
    }
}

/// Iterate the Guttman transform from `start`. The recorded stress never
/// increases: an iteration that would raise it (round-off at convergence)
/// is rejected and iteration stops.
pub fn majorize(dist: &[f64], n: usize, dim: usize, start: Vec<f64>, opts: &MdsOptions) -> MdsResult {
    let mut x = start;
    center(&mut x, n, dim);
    let mut stress = normalized_stress(dist, &x, dim);
    let mut history = vec![stress];
    let mut converged = stress <= f64::MIN_POSITIVE || n < 2;
    let mut iter = 0;
    while !converged && iter < opts.max_iters {
        iter += 1;
        let mut next = guttman(dist, &x, n, dim);
        center(&mut next, n, dim);
        let s = normalized_stress(dist, &next, dim);
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN stress also stops
        if !(s <= stress) {
            converged = true;
            break;
        }
        let decrease = stress - s;
        x = next;
        history.push(s);
        if decrease <= opts.tolerance * stress || s <= 1e-30 {
            converged = true;
        }
        stress = s;
    }
    MdsResult {
        coords: x,
        dim,
        stress_history: history,
        converged,
        random_start: false,
    }
}

/// Embed an `n x n` dissimilarity matrix into `dim` dimensions.
///
/// Starts from classical scaling; when that is ambiguous, runs several
/// seeded random starts and keeps the one with the lowest final stress.
pub fn embed_distance_matrix(dist: &[f64], n: usize, dim: usize, opts: &MdsOptions) -> MdsResult {
    if n == 0 {
        return MdsResult {
            coords: vec![],
            dim,
            stress_history: vec![0.0],
            converged: true,
            random_start: false,
        };
    }
    if let Some(start) = classical_mds(dist, n, dim) {
        return majorize(dist, n, dim, start, opts);
    }
    let scale = {
        let s: f64 = dist.iter().sum();
        if s > 0.0 {
            s / (n * n) as f64
        } else {
            1.0
        }
    };
    let mut best: Option<MdsResult> = None;
    for r in 0..RANDOM_RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r));
        let start: Vec<f64> = (0..n * dim)
            .map(|_| scale * (2.0 * rng.random::<f64>() - 1.0))
            .collect();
        let res = majorize(dist, n, dim, start, opts);
        if best.as_ref().is_none_or(|b| res.stress() < b.stress()) {
            best = Some(res);
        }
    }
    let mut best = best.expect("at least one restart");
    best.random_start = true;
    best
}

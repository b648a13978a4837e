//! Synthetic query logs with a planted geometry.
//!
//! Users walk on a surface `z = h(x, y)` over the disk of radius
//! `domain_radius`. Each click at surface point `P` is encoded into query
//! terms with directional windows: for every direction `u_k` of a fixed
//! family set, the query contains every anchor term of that family whose
//! anchor position `a_j` satisfies `|a_j - u_k . P| <= L`, with
//! `L = domain_radius`. Two clicks then share a fraction of their terms that
//! decays linearly with `|u_k . (P - Q)|`; averaged over directions this makes
//! `1 - cos` proportional to `|P - Q|`. The proportionality constant is
//! reported as [`GroundTruth::distance_scale`].
//!
//! Positional terms only ever appear in queries. Response bodies hold a small
//! boilerplate vocabulary shared by every document, so the positional terms
//! all receive the same inverse document frequency and the boilerplate terms
//! receive almost none.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::event::ClickEvent;
use super::LogError;

const BOILERPLATE: [&str; 4] = ["home", "results", "search", "help"];
const MAX_FAMILIES: usize = 16;
const BASE_TIME_MS: u64 = 1_700_000_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Surface {
    FlatPlane,
    /// Half-sphere of the given radius centred on the origin.
    HemisphereBump { radius: f64 },
    /// Bilinearly interpolated heights on a regular grid; `heights` is row-major
    /// with `nx` values per row. Outside the extent the nearest edge is used.
    HeightGrid {
        x_range: [f64; 2],
        y_range: [f64; 2],
        nx: usize,
        ny: usize,
        heights: Vec<f64>,
    },
}

impl Surface {
    pub fn height(&self, x: f64, y: f64) -> f64 {
        match self {
            Surface::FlatPlane => 0.0,
            Surface::HemisphereBump { radius } => {
                let r2 = x * x + y * y;
                if r2 < radius * radius {
                    (radius * radius - r2).sqrt()
                } else {
                    0.0
                }
            }
            Surface::HeightGrid {
                x_range,
                y_range,
                nx,
                ny,
                heights,
            } => {
                let fx = frac_index(x, *x_range, *nx);
                let fy = frac_index(y, *y_range, *ny);
                let (i0, tx) = split(fx, *nx);
                let (j0, ty) = split(fy, *ny);
                let i1 = (i0 + 1).min(nx - 1);
                let j1 = (j0 + 1).min(ny - 1);
                let at = |i: usize, j: usize| heights[j * nx + i];
                (1.0 - ty) * ((1.0 - tx) * at(i0, j0) + tx * at(i1, j0))
                    + ty * ((1.0 - tx) * at(i0, j1) + tx * at(i1, j1))
            }
        }
    }

    fn is_flat(&self) -> bool {
        matches!(self, Surface::FlatPlane)
    }

    fn max_abs_height(&self) -> f64 {
        match self {
            Surface::FlatPlane => 0.0,
            Surface::HemisphereBump { radius } => radius.abs(),
            Surface::HeightGrid { heights, .. } => {
                heights.iter().fold(0.0f64, |m, h| m.max(h.abs()))
            }
        }
    }

    fn validate(&self) -> Result<(), LogError> {
        match self {
            Surface::FlatPlane => Ok(()),
            Surface::HemisphereBump { radius } => {
                if radius.is_finite() && *radius > 0.0 {
                    Ok(())
                } else {
                    Err(LogError::InvalidParam("hemisphere radius must be > 0".into()))
                }
            }
            Surface::HeightGrid {
                x_range,
                y_range,
                nx,
                ny,
                heights,
            } => {
                if *nx < 2 || *ny < 2 || heights.len() != nx * ny {
                    return Err(LogError::InvalidParam(
                        "height grid needs nx, ny >= 2 and nx*ny heights".into(),
                    ));
                }
                if !(x_range[1] > x_range[0] && y_range[1] > y_range[0]) {
                    return Err(LogError::InvalidParam("height grid ranges are empty".into()));
                }
                if heights.iter().any(|h| !h.is_finite()) {
                    return Err(LogError::InvalidParam("height grid has non-finite values".into()));
                }
                Ok(())
            }
        }
    }
}

fn frac_index(v: f64, range: [f64; 2], n: usize) -> f64 {
    let t = (v - range[0]) / (range[1] - range[0]);
    (t.clamp(0.0, 1.0)) * (n - 1) as f64
}

fn split(f: f64, n: usize) -> (usize, f64) {
    let i = (f.floor() as usize).min(n - 2);
    (i, f - i as f64)
}

fn default_step_length() -> f64 {
    0.015
}

fn default_domain_radius() -> f64 {
    0.3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub surface: Surface,
    pub num_users: usize,
    /// Inclusive range of clicks per session.
    pub session_length_range: [usize; 2],
    pub vocabulary_size: usize,
    /// Standard deviation of the Gaussian jitter added to every step and to
    /// the position encoded into each query.
    pub noise_scale: f64,
    pub seed: u64,
    #[serde(default = "default_step_length")]
    pub step_length: f64,
    #[serde(default = "default_domain_radius")]
    pub domain_radius: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            surface: Surface::FlatPlane,
            num_users: 50,
            session_length_range: [5, 10],
            vocabulary_size: 4096,
            noise_scale: 0.0,
            seed: 1,
            step_length: default_step_length(),
            domain_radius: default_domain_radius(),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), LogError> {
        let bad = |m: &str| Err(LogError::InvalidParam(m.to_string()));
        if self.num_users < 1 {
            return bad("synth.num_users must be >= 1");
        }
        let [lo, hi] = self.session_length_range;
        if lo < 2 || hi < lo {
            return bad("synth.session_length_range must satisfy 2 <= min <= max");
        }
        if self.vocabulary_size < 2 {
            return bad("synth.vocabulary_size must be >= 2");
        }
        if !(self.noise_scale.is_finite() && self.noise_scale >= 0.0) {
            return bad("synth.noise_scale must be >= 0");
        }
        if !(self.step_length.is_finite() && self.step_length > 0.0) {
            return bad("synth.step_length must be > 0");
        }
        if !(self.domain_radius.is_finite() && self.domain_radius > 2.0 * self.step_length) {
            return bad("synth.domain_radius must exceed twice the step length");
        }
        self.surface.validate()
    }
}

/// Planted positions of the generated events, index-aligned with the event list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub planted: Vec<[f64; 2]>,
    /// Expected tf-idf cosine distance per unit of planted surface distance.
    pub distance_scale: f64,
}

struct Encoder {
    directions: Vec<[f64; 3]>,
    anchors: Vec<f64>,
    half_width: f64,
}

impl Encoder {
    fn new(cfg: &SynthConfig) -> Self {
        let families = (cfg.vocabulary_size / 16).clamp(1, MAX_FAMILIES);
        let per_family = (cfg.vocabulary_size / families).max(2);
        let directions = if cfg.surface.is_flat() {
            (0..families)
                .map(|k| {
                    let a = std::f64::consts::PI * k as f64 / families as f64;
                    [a.cos(), a.sin(), 0.0]
                })
                .collect()
        } else {
            hemisphere_directions(families)
        };
        let half_width = cfg.domain_radius;
        let extent = 2.0 * cfg.domain_radius + cfg.surface.max_abs_height();
        let anchors = (0..per_family)
            .map(|j| -extent + 2.0 * extent * j as f64 / (per_family - 1) as f64)
            .collect();
        Self {
            directions,
            anchors,
            half_width,
        }
    }

    fn terms(&self, p: [f64; 3]) -> Vec<String> {
        let mut out = Vec::new();
        for (k, u) in self.directions.iter().enumerate() {
            let proj = u[0] * p[0] + u[1] * p[1] + u[2] * p[2];
            for (j, a) in self.anchors.iter().enumerate() {
                if (a - proj).abs() <= self.half_width {
                    out.push(format!("f{k:02}a{j:04}"));
                }
            }
        }
        out
    }

    /// `E|u . d| / (2L)` for a unit displacement `d` in the surface.
    fn distance_scale(&self, flat: bool) -> f64 {
        let mean_abs_cos = if flat {
            2.0 / std::f64::consts::PI
        } else {
            0.5
        };
        mean_abs_cos / (2.0 * self.half_width)
    }
}

/// Evenly spread unit vectors on the upper half-sphere (Fibonacci lattice).
fn hemisphere_directions(count: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Generate a deterministic synthetic log.
///
/// Each user produces a single session whose length is drawn uniformly from
/// `session_length_range`. The walk starts uniformly in the disk of half the
/// domain radius, takes steps of `step_length` along a heading that turns by a
/// Gaussian angle (sd 0.5 rad) each click, and reverses when it would leave
/// the domain. Clicks are 15 s to 15 min apart, users start an hour apart.
pub fn synth_generate(cfg: &SynthConfig) -> Result<(Vec<ClickEvent>, GroundTruth), LogError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let encoder = Encoder::new(cfg);
    let doc_text = BOILERPLATE.join(" ");
    let radius = cfg.domain_radius;

    let mut events = Vec::new();
    let mut planted = Vec::new();
    for user in 0..cfg.num_users {
        let user_key = format!("u{user:04}");
        let len = rng.random_range(cfg.session_length_range[0]..=cfg.session_length_range[1]);
        let r = 0.5 * radius * rng.random::<f64>().sqrt();
        let a = std::f64::consts::TAU * rng.random::<f64>();
        let mut pos = [r * a.cos(), r * a.sin()];
        let mut heading = std::f64::consts::TAU * rng.random::<f64>();
        let mut ts = BASE_TIME_MS + user as u64 * 3_600_000 + rng.random_range(0..600_000u64);

        for step in 0..len {
            if step > 0 {
                heading += 0.5 * normal.sample(&mut rng);
                let jitter = [
                    cfg.noise_scale * normal.sample(&mut rng),
                    cfg.noise_scale * normal.sample(&mut rng),
                ];
                pos = take_step(pos, &mut heading, cfg.step_length, jitter, radius);
                ts += rng.random_range(15_000..900_000u64);
            }
            let enc_noise = [
                cfg.noise_scale * normal.sample(&mut rng),
                cfg.noise_scale * normal.sample(&mut rng),
            ];
            let ex = pos[0] + enc_noise[0];
            let ey = pos[1] + enc_noise[1];
            let p3 = [ex, ey, cfg.surface.height(ex, ey)];
            let idx = events.len();
            events.push(ClickEvent {
                user_key: user_key.clone(),
                timestamp_ms: ts,
                query_terms: encoder.terms(p3),
                doc_id: format!("d{idx:06}"),
                doc_terms: doc_text.split(' ').map(str::to_string).collect(),
            });
            planted.push(pos);
        }
    }
    let truth = GroundTruth {
        planted,
        distance_scale: encoder.distance_scale(cfg.surface.is_flat()),
    };
    Ok((events, truth))
}

fn take_step(pos: [f64; 2], heading: &mut f64, step: f64, jitter: [f64; 2], radius: f64) -> [f64; 2] {
    let attempt = |h: f64| {
        [
            pos[0] + step * h.cos() + jitter[0],
            pos[1] + step * h.sin() + jitter[1],
        ]
    };
    let inside = |p: [f64; 2]| p[0] * p[0] + p[1] * p[1] <= radius * radius;
    let p = attempt(*heading);
    if inside(p) {
        return p;
    }
    *heading += std::f64::consts::PI;
    let p = attempt(*heading);
    if inside(p) {
        return p;
    }
    let n = (p[0] * p[0] + p[1] * p[1]).sqrt();
    [p[0] * radius / n, p[1] * radius / n]
}

/// Ground-truth sidecar: one `{"event": i, "x": .., "y": ..}` object per line.
pub fn ground_truth_lines(truth: &GroundTruth) -> Vec<String> {
    truth
        .planted
        .iter()
        .enumerate()
        .map(|(i, p)| serde_json::json!({"event": i, "x": p[0], "y": p[1]}).to_string())
        .collect()
}

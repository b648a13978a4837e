//! Metric tensor fields over the embedded space, Christoffel symbols,
//! geodesic integration and the energy and length functionals.
//!
//! Christoffel symbols follow the standard second-kind formula
//! `Γ^j_kl = ½ g^jm (∂_k g_ml + ∂_l g_mk − ∂_m g_kl)` and geodesics solve
//! `ẍ^j = −Γ^j_kl ẋ^k ẋ^l`, so straight lines are geodesics of a flat metric.
//! Only positive-definite (Riemannian) metrics are supported.

mod christoffel;
mod field;
mod fit;
mod functional;
mod geodesic;
mod grid;

pub use christoffel::{christoffel, ChristoffelTensor};
pub use field::{Interpolation, MetricEval, MetricField};
pub use fit::{fit_metric_field, grid_for_space, FitOptions, FitReport, NodeFit};
pub use functional::{curve_energy, curve_length};
pub use geodesic::{integrate_geodesic, GeodesicRun, Sample, StopReason, Trajectory, TrajectoryKind};
pub use grid::Grid;

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("point {0:?} lies outside the grid interior")]
    OutsideInterior(Vec<f64>),
    #[error("geodesic from {0:?} leaves the grid interior within the first step")]
    ImmediateBoundary(Vec<f64>),
    #[error("interpolated metric is not positive definite at {0:?}")]
    NotPositiveDefinite(Vec<f64>),
    #[error("curve needs at least 2 samples, got {0}")]
    DegenerateCurve(usize),
    #[error("integration diverged at t = {t} after {samples} valid samples")]
    Diverged { t: f64, samples: usize },
    #[error("malformed metric file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

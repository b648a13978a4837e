use super::{GeometryError, MetricField, Trajectory};

fn quadratic_form(field: &MetricField, x: &[f64], v: &[f64]) -> Result<f64, GeometryError> {
    let g = field.metric_at(x)?;
    let m = v.len();
    let mut acc = 0.0;
    for i in 0..m {
        for j in 0..m {
            acc += g[(i, j)] * v[i] * v[j];
        }
    }
    Ok(acc)
}

fn trapezoid(curve: &Trajectory, integrand: impl Fn(f64) -> f64, field: &MetricField) -> Result<f64, GeometryError> {
    if curve.len() < 2 {
        return Err(GeometryError::DegenerateCurve(curve.len()));
    }
    let vals = curve
        .samples
        .iter()
        .map(|s| quadratic_form(field, &s.x, &s.v).map(&integrand))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(curve
        .samples
        .windows(2)
        .zip(vals.windows(2))
        .map(|(s, f)| 0.5 * (s[1].t - s[0].t) * (f[0] + f[1]))
        .sum())
}

/// `∫ g(ẋ, ẋ) dt` by the trapezoidal rule over the samples.
pub fn curve_energy(field: &MetricField, curve: &Trajectory) -> Result<f64, GeometryError> {
    trapezoid(curve, |q| q, field)
}

/// `∫ √g(ẋ, ẋ) dt` by the trapezoidal rule over the samples.
pub fn curve_length(field: &MetricField, curve: &Trajectory) -> Result<f64, GeometryError> {
    trapezoid(curve, |q| q.max(0.0).sqrt(), field)
}

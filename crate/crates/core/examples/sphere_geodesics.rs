//! Geodesics on a sampled round sphere: Christoffel symbols against the
//! closed form, an equator loop and a meridian.
//!
//! cargo run --example sphere_geodesics

use std::f64::consts::PI;

use irspace::geometry::{christoffel, curve_energy, curve_length, integrate_geodesic, Grid, Interpolation, MetricField};
use nalgebra::DMatrix;

fn sphere(lo: [f64; 2], hi: [f64; 2]) -> MetricField {
    let grid = Grid::uniform(&lo, &hi, &[256, 256]).unwrap();
    MetricField::from_fn(grid, Interpolation::Cubic, |x| {
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, x[0].sin().powi(2)])
    })
    .unwrap()
}

fn main() {
    let field = sphere([0.2, -0.5], [PI - 0.2, 2.0 * PI + 0.5]);
    let th: f64 = 1.0;
    let c = christoffel(&field, &[th, 1.0]).unwrap();
    println!("G^th_phph = {:.6} (exact {:.6})", c.get(0, 1, 1), -th.sin() * th.cos());
    println!("G^ph_thph = {:.6} (exact {:.6})", c.get(1, 0, 1), th.cos() / th.sin());

    let eq = sphere([PI / 2.0 - 1.0, -0.5], [PI / 2.0 + 1.0, 2.0 * PI + 0.5]);
    let run = integrate_geodesic(&eq, &[PI / 2.0, 0.0], &[0.0, 1.0], 2.0 * PI, 1e-3).unwrap();
    println!(
        "equator: {:?}, length {:.6}, energy {:.6}",
        run.stop,
        curve_length(&eq, &run.trajectory).unwrap(),
        curve_energy(&eq, &run.trajectory).unwrap()
    );

    let mer = sphere([-PI / 2.0 - 0.1, -1.0], [1.5 * PI + 0.1, 1.0]);
    let run = integrate_geodesic(&mer, &[PI / 2.0, 0.0], &[1.0, 0.0], PI, 1e-3).unwrap();
    let end = run.trajectory.last().unwrap();
    println!("meridian ends at theta = {:.6} (exact {:.6})", end.x[0], 1.5 * PI);

    let mut csv = Vec::new();
    run.trajectory.write_csv(&mut csv).unwrap();
    println!("{} CSV rows, first: {}", run.trajectory.len(), String::from_utf8_lossy(&csv).lines().nth(1).unwrap());
}

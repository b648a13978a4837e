//! Fit a metric field to an embedded synthetic space and integrate a
//! geodesic from the start of the first thread.
//!
//! cargo run --example fit_metric

use irspace::geometry::{curve_length, fit_metric_field, integrate_geodesic, FitOptions};
use irspace::logmodel::{extract_clickstreams, synth_generate, SessionParams, SynthConfig};
use irspace::metricspace::{build_prespace, Bm25Params, CorpusStats, DistanceMethod, DistanceModel};
use irspace::skeleton::{default_k, embed_layers, form_simplices, link_nearest_neighbors, EmbedOptions};

fn main() {
    let (events, _) = synth_generate(&SynthConfig::default()).unwrap();
    let streams = extract_clickstreams(events.clone(), SessionParams::default()).unwrap();
    let stats = CorpusStats::from_events(&events).unwrap();
    let model = DistanceModel::new(DistanceMethod::TfidfCosine, &stats, Bm25Params::default());
    let ps = build_prespace(&streams, &model).unwrap();
    let sk = form_simplices(link_nearest_neighbors(&ps, default_k(2)), 2);
    let space = embed_layers(&ps, &sk, 2, &EmbedOptions::default()).unwrap();

    let (field, report) = fit_metric_field(&space, &FitOptions::default()).unwrap();
    println!(
        "grid {:?}: {} fitted, {} empty, {} fallback, {} floored, median eigenvalue {:.4}",
        field.grid().nodes,
        report.fitted,
        report.empty,
        report.fallback,
        report.floored,
        report.median_eigenvalue
    );

    let pts = space.thread_coords(&space.threads[0]);
    let v0: Vec<f64> = pts[1].iter().zip(&pts[0]).map(|(b, a)| b - a).collect();
    let run = integrate_geodesic(&field, &pts[0], &v0, 1.0, 1e-3).unwrap();
    let end = run.trajectory.last().unwrap();
    println!("geodesic from {:?}", pts[0]);
    println!("  stop {:?} at {:?}", run.stop, end.x);
    println!("  observed next point {:?}", pts[1]);
    println!("  length {:.4}", curve_length(&field, &run.trajectory).unwrap());
}

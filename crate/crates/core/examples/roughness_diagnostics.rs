//! Roughness of a flat synthetic environment against one with a planted
//! bump, and the smoothing delta between them.
//!
//! cargo run --example roughness_diagnostics

use irspace::diagnostics::{roughness, smoothing_delta, RoughnessOptions, RoughnessReport};
use irspace::geometry::{fit_metric_field, FitOptions};
use irspace::logmodel::{extract_clickstreams, synth_generate, SessionParams, Surface, SynthConfig};
use irspace::metricspace::{build_prespace, Bm25Params, CorpusStats, DistanceMethod, DistanceModel};
use irspace::skeleton::{default_k, embed_layers, form_simplices, link_nearest_neighbors, EmbedOptions};

fn report(surface: Surface) -> RoughnessReport {
    let (events, _) = synth_generate(&SynthConfig {
        surface,
        ..SynthConfig::default()
    })
    .unwrap();
    let streams = extract_clickstreams(events.clone(), SessionParams::default()).unwrap();
    let stats = CorpusStats::from_events(&events).unwrap();
    let model = DistanceModel::new(DistanceMethod::TfidfCosine, &stats, Bm25Params::default());
    let ps = build_prespace(&streams, &model).unwrap();
    let sk = form_simplices(link_nearest_neighbors(&ps, default_k(2)), 2);
    let space = embed_layers(&ps, &sk, 2, &EmbedOptions::default()).unwrap();
    let (field, _) = fit_metric_field(&space, &FitOptions::default()).unwrap();
    roughness(&space, &field, &RoughnessOptions::default())
}

fn main() {
    let bumpy = report(Surface::HemisphereBump { radius: 0.2 });
    let flat = report(Surface::FlatPlane);
    println!("bump:\n{}", bumpy.to_text());
    println!("flat:\n{}", flat.to_text());
    println!("bump -> flat:\n{}", smoothing_delta(&bumpy, &flat).unwrap().to_text());
}

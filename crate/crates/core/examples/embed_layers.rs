//! Build the layered pre-space from synthetic clickstreams, link
//! neighbours, form triangles and embed every layer in the plane.
//!
//! cargo run --example embed_layers

use irspace::logmodel::{extract_clickstreams, synth_generate, SessionParams, SynthConfig};
use irspace::metricspace::{build_prespace, Bm25Params, CorpusStats, DistanceMethod, DistanceModel};
use irspace::skeleton::{default_k, embed_layers, form_simplices, link_nearest_neighbors, EmbedOptions};

fn main() {
    let cfg = SynthConfig {
        num_users: 30,
        ..SynthConfig::default()
    };
    let (events, _) = synth_generate(&cfg).unwrap();
    let streams = extract_clickstreams(events.clone(), SessionParams::default()).unwrap();
    let stats = CorpusStats::from_events(&events).unwrap();
    let model = DistanceModel::new(DistanceMethod::TfidfCosine, &stats, Bm25Params::default());
    let ps = build_prespace(&streams, &model).unwrap();

    let n = 2;
    let skeleton = form_simplices(link_nearest_neighbors(&ps, default_k(n)), n);
    println!(
        "{} streams, {} layers, {} knn edges, {} cells",
        streams.len(),
        ps.layers.len(),
        skeleton.knn_edges.len(),
        skeleton.cells.len()
    );
    let space = embed_layers(&ps, &skeleton, n, &EmbedOptions::default()).unwrap();
    for r in &space.layer_reports {
        println!(
            "layer {:2}: {:2} points, stress {:.2e}, {} iterations{}",
            r.layer,
            r.points,
            r.stress_history.last().unwrap(),
            r.stress_history.len() - 1,
            if r.converged { "" } else { " (not converged)" }
        );
    }
}

//! Compare two environments built from the same users with different
//! relevance distances.
//!
//! cargo run --example compare_environments

use irspace::diagnostics::compare_environments;
use irspace::logmodel::{extract_clickstreams, synth_generate, SessionParams, SynthConfig};
use irspace::metricspace::{build_prespace, Bm25Params, CorpusStats, DistanceMethod, DistanceModel};
use irspace::skeleton::{default_k, embed_layers, form_simplices, link_nearest_neighbors, EmbedOptions, EmbeddedSpace};

fn environment(method: DistanceMethod) -> EmbeddedSpace {
    let (events, _) = synth_generate(&SynthConfig::default()).unwrap();
    let streams = extract_clickstreams(events.clone(), SessionParams::default()).unwrap();
    let stats = CorpusStats::from_events(&events).unwrap();
    let model = DistanceModel::new(method, &stats, Bm25Params::default());
    let ps = build_prespace(&streams, &model).unwrap();
    let sk = form_simplices(link_nearest_neighbors(&ps, default_k(2)), 2);
    embed_layers(&ps, &sk, 2, &EmbedOptions::default()).unwrap()
}

fn main() {
    let a = environment(DistanceMethod::TfidfCosine);
    let b = environment(DistanceMethod::Bm25Sym);
    let pairs: Vec<(String, String)> = a
        .threads
        .iter()
        .map(|t| (t.stream_id.clone(), t.stream_id.clone()))
        .collect();

    let same = compare_environments(&a, &a, &pairs).unwrap();
    println!("tfidf vs itself:\n{}", same.to_text());
    let diff = compare_environments(&a, &b, &pairs).unwrap();
    println!("tfidf vs bm25:\n{}", diff.to_text());
    let worst = diff.pairs.iter().max_by(|x, y| x.frechet.total_cmp(&y.frechet)).unwrap();
    println!("most different thread: {} (frechet {:.4})", worst.a, worst.frechet);
}

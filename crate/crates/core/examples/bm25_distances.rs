//! BM25 scores and the two click distances on a toy corpus.
//!
//! cargo run --example bm25_distances

use std::collections::BTreeMap;

use irspace::logmodel::ClickEvent;
use irspace::metricspace::{bm25_score, click_distance, idf, Bm25Params, CorpusStats, DistanceMethod};

fn main() {
    let clicks = [
        ClickEvent::new("u", 0, "cheap flights", "d1", "cheap flights to rome and paris"),
        ClickEvent::new("u", 1, "flights rome", "d2", "rome flights from london"),
        ClickEvent::new("u", 2, "pasta recipe", "d3", "fresh pasta recipe with eggs"),
    ];
    let stats = CorpusStats::from_events(&clicks).unwrap();
    let params = Bm25Params::default();
    println!("docs {}, avgdl {:.2}", stats.num_docs(), stats.avg_doc_len());
    for term in ["flights", "rome", "pasta", "zebra"] {
        println!("idf({term}) = {:.4}", idf(term, &stats));
    }

    let query: Vec<String> = vec!["cheap".into(), "flights".into()];
    for c in &clicks {
        let mut tf = BTreeMap::new();
        for t in &c.doc_terms {
            *tf.entry(t.clone()).or_insert(0) += 1;
        }
        let s = bm25_score(&query, &c.doc_id, &tf, &stats, params).unwrap();
        println!("bm25(cheap flights, {}) = {s:.4}", c.doc_id);
    }

    for method in [DistanceMethod::TfidfCosine, DistanceMethod::Bm25Sym] {
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let d = click_distance(&clicks[i], &clicks[j], method, &stats, params).unwrap();
            println!("{method:?} d({i},{j}) = {d:.4}");
        }
    }
}

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::bm25::{idf_from_counts, score_with};
use super::{Bm25Params, CorpusStats, MetricError};
use crate::logmodel::ClickEvent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    /// `1 - cos` of tf-idf vectors over query and body terms.
    #[default]
    TfidfCosine,
    /// `1 / (1 + s)` with `s` the mean of the two cross BM25 scores.
    Bm25Sym,
}

impl FromStr for DistanceMethod {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tfidf_cosine" => Ok(Self::TfidfCosine),
            "bm25_sym" => Ok(Self::Bm25Sym),
            other => Err(MetricError::InvalidParam(format!(
                "unknown distance method {other:?} (expected tfidf_cosine or bm25_sym)"
            ))),
        }
    }
}

/// A click reduced to what the distance functions need.
#[derive(Debug, Clone)]
pub struct PreparedClick {
    /// Sorted by term.
    tfidf: Vec<(String, f64)>,
    norm: f64,
    query_terms: Vec<String>,
    doc_tf: BTreeMap<String, usize>,
    doc_len: Option<usize>,
    doc_id: String,
}

/// A distance method bound to its corpus statistics.
#[derive(Debug, Clone, Copy)]
pub struct DistanceModel<'a> {
    pub method: DistanceMethod,
    pub stats: &'a CorpusStats,
    pub params: Bm25Params,
}

impl<'a> DistanceModel<'a> {
    pub fn new(method: DistanceMethod, stats: &'a CorpusStats, params: Bm25Params) -> Self {
        Self {
            method,
            stats,
            params,
        }
    }

    pub fn prepare(&self, ev: &ClickEvent) -> PreparedClick {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for t in ev.all_terms() {
            *counts.entry(t).or_default() += 1;
        }
        let tfidf: Vec<(String, f64)> = counts
            .into_iter()
            .map(|(t, c)| {
                let w = c as f64 * idf_from_counts(self.stats.num_docs(), self.stats.doc_freq(t));
                (t.to_string(), w)
            })
            .collect();
        let norm = tfidf.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        let mut doc_tf = BTreeMap::new();
        for t in &ev.doc_terms {
            *doc_tf.entry(t.clone()).or_default() += 1;
        }
        PreparedClick {
            tfidf,
            norm,
            query_terms: ev.query_terms.clone(),
            doc_tf,
            doc_len: self.stats.doc_len(&ev.doc_id),
            doc_id: ev.doc_id.clone(),
        }
    }

    pub fn distance_prepared(&self, a: &PreparedClick, b: &PreparedClick) -> Result<f64, MetricError> {
        match self.method {
            DistanceMethod::TfidfCosine => Ok(cosine_distance(a, b)),
            DistanceMethod::Bm25Sym => {
                let ab = self.cross_score(a, b)?;
                let ba = self.cross_score(b, a)?;
                Ok(1.0 / (1.0 + 0.5 * (ab + ba)))
            }
        }
    }

    fn cross_score(&self, query: &PreparedClick, doc: &PreparedClick) -> Result<f64, MetricError> {
        let len = doc
            .doc_len
            .ok_or_else(|| MetricError::UnknownDocument(doc.doc_id.clone()))?;
        Ok(score_with(
            query.query_terms.iter().map(String::as_str),
            |t| doc.doc_tf.get(t).copied().unwrap_or(0),
            len,
            self.stats,
            self.params,
        ))
    }
}

fn cosine_distance(a: &PreparedClick, b: &PreparedClick) -> f64 {
    if a.norm == 0.0 || b.norm == 0.0 {
        return 1.0;
    }
    if a.tfidf == b.tfidf {
        return 0.0;
    }
    let (mut i, mut j) = (0, 0);
    let mut dot = 0.0;
    while i < a.tfidf.len() && j < b.tfidf.len() {
        match a.tfidf[i].0.cmp(&b.tfidf[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += a.tfidf[i].1 * b.tfidf[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    if dot == 0.0 {
        return 1.0;
    }
    (1.0 - dot / (a.norm * b.norm)).clamp(0.0, 1.0)
}

/// Distance between two clicks. Both methods return values in `[0, 1]` and
/// are symmetric; the triangle inequality is not guaranteed for `bm25_sym`.
pub fn click_distance(
    a: &ClickEvent,
    b: &ClickEvent,
    method: DistanceMethod,
    stats: &CorpusStats,
    params: Bm25Params,
) -> Result<f64, MetricError> {
    let model = DistanceModel::new(method, stats, params);
    model.distance_prepared(&model.prepare(a), &model.prepare(b))
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CorpusStats, MetricError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

impl Bm25Params {
    pub fn new(k1: f64, b: f64) -> Result<Self, MetricError> {
        let p = Self { k1, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), MetricError> {
        if !(self.k1.is_finite() && self.k1 >= 0.0) {
            return Err(MetricError::InvalidParam(format!(
                "Bm25Params.k1 = {} must be >= 0",
                self.k1
            )));
        }
        if !(0.0..=1.0).contains(&self.b) {
            return Err(MetricError::InvalidParam(format!(
                "Bm25Params.b = {} must lie in [0, 1]",
                self.b
            )));
        }
        Ok(())
    }
}

/// Floored inverse document frequency `ln((N - n + 0.5) / (n + 0.5) + 1)`.
/// Never negative.
pub fn idf(term: &str, stats: &CorpusStats) -> f64 {
    idf_from_counts(stats.num_docs(), stats.doc_freq(term))
}

pub(crate) fn idf_from_counts(num_docs: usize, df: usize) -> f64 {
    let n = num_docs as f64;
    let nt = df as f64;
    ((n - nt + 0.5) / (nt + 0.5) + 1.0).ln()
}

/// Okapi BM25 score of a query against one document.
///
/// `term_freqs` are the raw counts of each term in the document; `|D|` is
/// taken from `stats`. Repeated query terms contribute once per occurrence.
pub fn bm25_score(
    query_terms: &[String],
    doc_id: &str,
    term_freqs: &BTreeMap<String, usize>,
    stats: &CorpusStats,
    params: Bm25Params,
) -> Result<f64, MetricError> {
    let doc_len = stats
        .doc_len(doc_id)
        .ok_or_else(|| MetricError::UnknownDocument(doc_id.to_string()))?;
    Ok(score_with(
        query_terms.iter().map(String::as_str),
        |t| term_freqs.get(t).copied().unwrap_or(0),
        doc_len,
        stats,
        params,
    ))
}

pub(crate) fn score_with<'a>(
    query_terms: impl Iterator<Item = &'a str>,
    tf: impl Fn(&str) -> usize,
    doc_len: usize,
    stats: &CorpusStats,
    params: Bm25Params,
) -> f64 {
    let norm = params.k1 * (1.0 - params.b + params.b * doc_len as f64 / stats.avg_doc_len());
    let mut score = 0.0;
    for q in query_terms {
        let f = tf(q) as f64;
        if f == 0.0 {
            continue;
        }
        score += idf(q, stats) * f * (params.k1 + 1.0) / (f + norm);
    }
    score
}

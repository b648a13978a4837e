use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::logmodel::ClickEvent;

/// Document statistics feeding the inverse document frequency and the
/// length normalisation of BM25.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    num_docs: usize,
    doc_freq: BTreeMap<String, usize>,
    avg_doc_len: f64,
    doc_len: BTreeMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SidecarLine {
    Header { num_docs: usize, avg_doc_len: f64 },
    Term { term: String, df: usize },
    Doc { doc: String, len: usize },
}

impl CorpusStats {
    pub fn new(
        num_docs: usize,
        doc_freq: BTreeMap<String, usize>,
        avg_doc_len: f64,
        doc_len: BTreeMap<String, usize>,
    ) -> Result<Self, MetricError> {
        let stats = Self {
            num_docs,
            doc_freq,
            avg_doc_len,
            doc_len,
        };
        stats.validate()?;
        Ok(stats)
    }

    fn validate(&self) -> Result<(), MetricError> {
        if self.num_docs < 1 {
            return Err(MetricError::InvalidCorpus("num_docs must be >= 1".into()));
        }
        if !(self.avg_doc_len.is_finite() && self.avg_doc_len > 0.0) {
            return Err(MetricError::InvalidCorpus("avg_doc_len must be > 0".into()));
        }
        if let Some((t, df)) = self
            .doc_freq
            .iter()
            .find(|(_, &df)| df < 1 || df > self.num_docs)
        {
            return Err(MetricError::InvalidCorpus(format!(
                "doc_freq[{t:?}] = {df} outside [1, {}]",
                self.num_docs
            )));
        }
        Ok(())
    }

    /// Treat every distinct `doc_id` as a document, using the body terms of
    /// its first occurrence.
    ///
    /// When no document carries body text the average length would be zero;
    /// it is then set to 1 so that length normalisation stays defined.
    pub fn from_events(events: &[ClickEvent]) -> Result<Self, MetricError> {
        let mut doc_len = BTreeMap::new();
        let mut doc_freq: BTreeMap<String, usize> = BTreeMap::new();
        for ev in events {
            if doc_len.contains_key(&ev.doc_id) {
                continue;
            }
            doc_len.insert(ev.doc_id.clone(), ev.doc_terms.len());
            let mut seen: Vec<&str> = ev.doc_terms.iter().map(String::as_str).collect();
            seen.sort_unstable();
            seen.dedup();
            for t in seen {
                *doc_freq.entry(t.to_string()).or_default() += 1;
            }
        }
        let num_docs = doc_len.len();
        if num_docs == 0 {
            return Err(MetricError::InvalidCorpus("no documents in log".into()));
        }
        let total: usize = doc_len.values().sum();
        let avg = if total == 0 {
            1.0
        } else {
            total as f64 / num_docs as f64
        };
        Self::new(num_docs, doc_freq, avg, doc_len)
    }

    pub fn num_docs(&self) -> usize {
        self.num_docs
    }

    pub fn avg_doc_len(&self) -> f64 {
        self.avg_doc_len
    }

    /// Number of documents containing `term` (0 when unseen).
    pub fn doc_freq(&self, term: &str) -> usize {
        self.doc_freq.get(term).copied().unwrap_or(0)
    }

    pub fn doc_len(&self, doc_id: &str) -> Option<usize> {
        self.doc_len.get(doc_id).copied()
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut line = |l: SidecarLine| -> std::io::Result<()> {
            writeln!(out, "{}", serde_json::to_string(&l).map_err(std::io::Error::other)?)
        };
        line(SidecarLine::Header {
            num_docs: self.num_docs,
            avg_doc_len: self.avg_doc_len,
        })?;
        for (t, df) in &self.doc_freq {
            line(SidecarLine::Term {
                term: t.clone(),
                df: *df,
            })?;
        }
        for (d, len) in &self.doc_len {
            line(SidecarLine::Doc {
                doc: d.clone(),
                len: *len,
            })?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self, MetricError> {
        let mut header = None;
        let mut doc_freq = BTreeMap::new();
        let mut doc_len = BTreeMap::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: SidecarLine = serde_json::from_str(&line)
                .map_err(|e| MetricError::InvalidCorpus(format!("line {}: {e}", i + 1)))?;
            match parsed {
                SidecarLine::Header {
                    num_docs,
                    avg_doc_len,
                } => header = Some((num_docs, avg_doc_len)),
                SidecarLine::Term { term, df } => {
                    doc_freq.insert(term, df);
                }
                SidecarLine::Doc { doc, len } => {
                    doc_len.insert(doc, len);
                }
            }
        }
        let (n, avg) =
            header.ok_or_else(|| MetricError::InvalidCorpus("missing header line".into()))?;
        Self::new(n, doc_freq, avg, doc_len)
    }
}

use serde::{Deserialize, Serialize};

/// One click: a query together with the document that answered it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClickEvent {
    pub user_key: String,
    /// Milliseconds since the Unix epoch.
    pub timestamp_ms: u64,
    pub query_terms: Vec<String>,
    pub doc_id: String,
    /// Terms of the response body. Empty when only the document id was logged.
    #[serde(default)]
    pub doc_terms: Vec<String>,
}

impl ClickEvent {
    pub fn new(
        user_key: impl Into<String>,
        timestamp_ms: u64,
        query: &str,
        doc_id: impl Into<String>,
        doc_text: &str,
    ) -> Self {
        Self {
            user_key: user_key.into(),
            timestamp_ms,
            query_terms: normalize_terms(query),
            doc_id: doc_id.into(),
            doc_terms: normalize_terms(doc_text),
        }
    }

    /// Query terms followed by document terms.
    pub fn all_terms(&self) -> impl Iterator<Item = &str> {
        self.query_terms
            .iter()
            .chain(self.doc_terms.iter())
            .map(String::as_str)
    }
}

/// An ordered, temporally continuous run of one user's clicks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clickstream {
    pub stream_id: String,
    pub user_key: String,
    pub events: Vec<ClickEvent>,
}

impl Clickstream {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn start_ms(&self) -> Option<u64> {
        self.events.first().map(|e| e.timestamp_ms)
    }
}

/// Lowercase and split on whitespace.
pub fn normalize_terms(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_lowercase).collect()
}

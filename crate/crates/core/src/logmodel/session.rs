use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::event::{ClickEvent, Clickstream};
use super::LogError;

/// Thirty minutes, the conventional web-session cutoff.
pub const DEFAULT_GAP_MS: u64 = 30 * 60 * 1000;
pub const DEFAULT_MIN_LENGTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionParams {
    /// A gap strictly larger than this ends a stream.
    pub gap_ms: u64,
    pub min_length: usize,
}

impl Default for SessionParams {
    fn default() -> Self {
        Self {
            gap_ms: DEFAULT_GAP_MS,
            min_length: DEFAULT_MIN_LENGTH,
        }
    }
}

impl SessionParams {
    pub fn new(gap_ms: u64, min_length: usize) -> Result<Self, LogError> {
        let p = Self { gap_ms, min_length };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), LogError> {
        if self.gap_ms == 0 {
            return Err(LogError::InvalidParam("gap_threshold must be > 0".into()));
        }
        if self.min_length == 0 {
            return Err(LogError::InvalidParam("min_length must be >= 1".into()));
        }
        Ok(())
    }
}

/// Split events into per-user clickstreams.
///
/// Events are grouped by `user_key` and stably sorted by timestamp, so equal
/// timestamps keep their input order. Output is ordered by user key, then by
/// stream start. Stream ids are `<user_key>#<ordinal>` where the ordinal counts
/// every stream of that user, including ones later dropped for being short.
pub fn extract_clickstreams(
    events: Vec<ClickEvent>,
    params: SessionParams,
) -> Result<Vec<Clickstream>, LogError> {
    params.validate()?;
    let mut by_user: BTreeMap<String, Vec<ClickEvent>> = BTreeMap::new();
    for ev in events {
        match by_user.get_mut(ev.user_key.as_str()) {
            Some(v) => v.push(ev),
            None => {
                by_user.insert(ev.user_key.clone(), vec![ev]);
            }
        }
    }

    let mut streams = Vec::new();
    for (user, mut evs) in by_user {
        evs.sort_by_key(|e| e.timestamp_ms);
        let mut ordinal = 0usize;
        let mut current: Vec<ClickEvent> = Vec::new();
        let mut flush = |current: &mut Vec<ClickEvent>, ordinal: &mut usize| {
            if current.is_empty() {
                return;
            }
            let evs = std::mem::take(current);
            if evs.len() >= params.min_length {
                streams.push(Clickstream {
                    stream_id: format!("{user}#{ordinal}"),
                    user_key: user.clone(),
                    events: evs,
                });
            }
            *ordinal += 1;
        };
        for ev in evs {
            if let Some(last) = current.last() {
                if ev.timestamp_ms - last.timestamp_ms > params.gap_ms {
                    flush(&mut current, &mut ordinal);
                }
            }
            current.push(ev);
        }
        flush(&mut current, &mut ordinal);
    }
    Ok(streams)
}

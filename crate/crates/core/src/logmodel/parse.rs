//! Query-log readers and writers.
//!
//! Two line-oriented formats are supported:
//!
//! * `tsv`: `user_key \t timestamp_ms \t query_text \t doc_id [\t doc_text]`
//! * `jsonlines`: one object per line with keys `user`, `ts`, `query`, `doc`, `text`
//!
//! Malformed records are skipped and listed in the [`ParseReport`]. Records
//! without a `doc_id` are treated as broken links and skipped as well.

use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::event::{normalize_terms, ClickEvent};
use super::LogError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LogFormat {
    #[default]
    Tsv,
    Jsonlines,
}

impl FromStr for LogFormat {
    type Err = LogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(Self::Tsv),
            "jsonlines" | "jsonl" => Ok(Self::Jsonlines),
            other => Err(LogError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedRecord {
    /// 1-based line number in the input.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseReport {
    pub parsed: usize,
    pub skipped: Vec<SkippedRecord>,
}

impl ParseReport {
    pub fn skipped_count(&self) -> usize {
        self.skipped.len()
    }
}

/// Parse already-decoded lines. Blank lines are ignored.
pub fn parse_log<I, S>(lines: I, format: LogFormat) -> (Vec<ClickEvent>, ParseReport)
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut events = Vec::new();
    let mut report = ParseReport::default();
    for (idx, line) in lines.into_iter().enumerate() {
        let line = line.as_ref().trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        let parsed = match format {
            LogFormat::Tsv => parse_tsv_record(line),
            LogFormat::Jsonlines => parse_json_record(line),
        };
        match parsed {
            Ok(ev) => {
                events.push(ev);
                report.parsed += 1;
            }
            Err(reason) => report.skipped.push(SkippedRecord {
                line: idx + 1,
                reason,
            }),
        }
    }
    (events, report)
}

/// Read and parse a whole stream. I/O and UTF-8 failures are fatal.
pub fn read_log<R: BufRead>(
    reader: R,
    format: LogFormat,
) -> Result<(Vec<ClickEvent>, ParseReport), LogError> {
    let lines = reader.lines().collect::<Result<Vec<_>, _>>()?;
    Ok(parse_log(lines, format))
}

fn parse_tsv_record(line: &str) -> Result<ClickEvent, String> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() < 4 {
        return Err(format!("expected at least 4 fields, found {}", fields.len()));
    }
    let user = required(fields[0], "user_key")?;
    let ts = fields[1]
        .trim()
        .parse::<u64>()
        .map_err(|_| format!("invalid timestamp_ms {:?}", fields[1]))?;
    let query = normalize_terms(fields[2]);
    if query.is_empty() {
        return Err("missing query_text".to_string());
    }
    let doc = required(fields[3], "doc_id")?;
    let doc_terms = fields.get(4).map(|t| normalize_terms(t)).unwrap_or_default();
    Ok(ClickEvent {
        user_key: user.to_string(),
        timestamp_ms: ts,
        query_terms: query,
        doc_id: doc.to_string(),
        doc_terms,
    })
}

fn required<'a>(field: &'a str, name: &str) -> Result<&'a str, String> {
    let f = field.trim();
    if f.is_empty() {
        Err(format!("missing {name}"))
    } else {
        Ok(f)
    }
}

fn parse_json_record(line: &str) -> Result<ClickEvent, String> {
    let v: Value = serde_json::from_str(line).map_err(|e| format!("invalid json: {e}"))?;
    let obj = v.as_object().ok_or("record is not a json object")?;
    let text_field = |key: &str| -> Option<String> {
        match obj.get(key) {
            Some(Value::String(s)) => Some(s.clone()),
            Some(Value::Number(n)) => Some(n.to_string()),
            _ => None,
        }
    };
    let user = text_field("user")
        .filter(|s| !s.trim().is_empty())
        .ok_or("missing user")?;
    let ts = match obj.get("ts") {
        Some(Value::Number(n)) => {
            if let Some(u) = n.as_u64() {
                u
            } else {
                let f = n.as_f64().unwrap_or(f64::NAN);
                if !f.is_finite() || f < 0.0 {
                    return Err(format!("invalid ts {n}"));
                }
                f.round() as u64
            }
        }
        Some(Value::String(s)) => s.trim().parse().map_err(|_| format!("invalid ts {s:?}"))?,
        _ => return Err("missing ts".to_string()),
    };
    let query = normalize_terms(&text_field("query").unwrap_or_default());
    if query.is_empty() {
        return Err("missing query".to_string());
    }
    let doc = text_field("doc")
        .filter(|s| !s.trim().is_empty())
        .ok_or("missing doc")?;
    let doc_terms = normalize_terms(&text_field("text").unwrap_or_default());
    Ok(ClickEvent {
        user_key: user.trim().to_string(),
        timestamp_ms: ts,
        query_terms: query,
        doc_id: doc.trim().to_string(),
        doc_terms,
    })
}

/// Render one event as a record of the given format (no trailing newline).
pub fn format_record(ev: &ClickEvent, format: LogFormat) -> String {
    match format {
        LogFormat::Tsv => format!(
            "{}\t{}\t{}\t{}\t{}",
            ev.user_key,
            ev.timestamp_ms,
            ev.query_terms.join(" "),
            ev.doc_id,
            ev.doc_terms.join(" ")
        ),
        LogFormat::Jsonlines => {
            let obj = serde_json::json!({
                "user": ev.user_key,
                "ts": ev.timestamp_ms,
                "query": ev.query_terms.join(" "),
                "doc": ev.doc_id,
                "text": ev.doc_terms.join(" "),
            });
            obj.to_string()
        }
    }
}

pub fn write_log<W: Write>(
    mut out: W,
    events: &[ClickEvent],
    format: LogFormat,
) -> std::io::Result<()> {
    for ev in events {
        writeln!(out, "{}", format_record(ev, format))?;
    }
    Ok(())
}

//! Click events, log parsing, sessionization and the synthetic log generator.

mod event;
mod parse;
mod session;
mod synth;

pub use event::{normalize_terms, ClickEvent, Clickstream};
pub use parse::{format_record, parse_log, read_log, write_log, LogFormat, ParseReport, SkippedRecord};
pub use session::{extract_clickstreams, SessionParams, DEFAULT_GAP_MS, DEFAULT_MIN_LENGTH};
pub use synth::{ground_truth_lines, synth_generate, GroundTruth, Surface, SynthConfig};

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error("cannot read log input: {0}")]
    Io(#[from] std::io::Error),
    #[error("unknown log format {0:?} (expected tsv or jsonlines)")]
    UnknownFormat(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

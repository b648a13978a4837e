//! Parse a small TSV log and split it into clickstreams.
//!
//! cargo run --example sessionize_log

use irspace::logmodel::{extract_clickstreams, parse_log, LogFormat, SessionParams};

const LOG: &str = "\
u1\t0\tred shoes\td1\tred running shoes
u2\t60000\tjazz records\td7\tvinyl jazz records
u1\t300000\tred shoes sale\td2\tshoes on sale
u1\t3600000\tweather\td9\tforecast
u2\t120000\tjazz vinyl\td8\t
u3\t5000\t\td3\tno query on this line
u1\t3660000\tweather tomorrow\td9\tforecast";

fn main() {
    let (events, report) = parse_log(LOG.lines(), LogFormat::Tsv);
    println!("parsed {} events, skipped {:?}", events.len(), report.skipped);

    let params = SessionParams::new(30 * 60 * 1000, 2).unwrap();
    for s in extract_clickstreams(events, params).unwrap() {
        let steps: Vec<String> = s
            .events
            .iter()
            .map(|e| format!("{}@{}s", e.query_terms.join("+"), e.timestamp_ms / 1000))
            .collect();
        println!("{}: {}", s.stream_id, steps.join(" -> "));
    }
}

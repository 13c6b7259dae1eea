//! CSV encoding of run records and aggregates.

use std::fmt::Write as _;
use std::path::Path;

use super::aggregate::AggregateRow;
use super::monte_carlo::{RunRecord, Score};
use crate::error::{Error, Result};

pub const RECORD_HEADER: &str = "scenario,directed,n,method,replicate,seed,ari,accuracy,exact,elapsed_ms";
pub const AGGREGATE_HEADER: &str = "scenario,directed,n,method,count,errors,mean_ari,sd_ari,exact_rate,mean_elapsed_ms";

fn decimal(v: f64) -> String {
    if v.is_finite() {
        let s = format!("{v:.6}");
        // Avoid "-0.000000".
        if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
            "0.000000".into()
        } else {
            s
        }
    } else {
        String::new()
    }
}

/// Shortest text that parses back to the same value, so per-record CSVs
/// round-trip exactly.
fn exact_decimal(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        v.to_string()
    }
}

pub fn records_to_csv(records: &[RunRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(RECORD_HEADER);
    out.push('\n');
    for r in records {
        let (ari, acc, exact) = match &r.outcome {
            Ok(s) => (exact_decimal(s.ari), exact_decimal(s.accuracy), s.exact.to_string()),
            Err(_) => (String::new(), String::new(), String::new()),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.scenario, r.directed, r.n, r.method, r.replicate, r.seed, ari, acc, exact, r.elapsed_ms
        )
        .expect("writing to a String");
    }
    out
}

pub fn aggregates_to_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::new();
    out.push_str(AGGREGATE_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.scenario,
            r.directed,
            r.n,
            r.method,
            r.count,
            r.errors,
            decimal(r.mean_ari),
            decimal(r.sd_ari),
            decimal(r.exact_rate),
            decimal(r.mean_elapsed_ms)
        )
        .expect("writing to a String");
    }
    out
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    write_text(path, &records_to_csv(records))
}

pub fn write_aggregate_csv(rows: &[AggregateRow], path: &Path) -> Result<()> {
    write_text(path, &aggregates_to_csv(rows))
}

/// Reads records written by [`records_to_csv`]. Error rows come back with a
/// placeholder message.
pub fn parse_records_csv(text: &str, origin: &Path) -> Result<Vec<RunRecord>> {
    let perr = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == RECORD_HEADER => {}
        _ => return Err(perr(1, format!("expected header '{RECORD_HEADER}'"))),
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(perr(line_no, format!("expected 10 fields, found {}", f.len())));
        }
        let field = |i: usize| f[i].trim();
        let wrap = |what: &str, e: String| perr(line_no, format!("{what}: {e}"));
        let parse_bool = |i: usize, what: &str| super::config::parse_bool(field(i)).map_err(|e| wrap(what, e));
        let outcome = if field(6).is_empty() {
            Err("failed".to_string())
        } else {
            Ok(Score {
                ari: field(6).parse().map_err(|e: std::num::ParseFloatError| wrap("ari", e.to_string()))?,
                accuracy: field(7).parse().map_err(|e: std::num::ParseFloatError| wrap("accuracy", e.to_string()))?,
                exact: parse_bool(8, "exact")?,
            })
        };
        out.push(RunRecord {
            scenario: field(0).parse().map_err(|e: Error| wrap("scenario", e.to_string()))?,
            directed: parse_bool(1, "directed")?,
            n: field(2).parse().map_err(|e: std::num::ParseIntError| wrap("n", e.to_string()))?,
            method: field(3).parse().map_err(|e: Error| wrap("method", e.to_string()))?,
            replicate: field(4).parse().map_err(|e: std::num::ParseIntError| wrap("replicate", e.to_string()))?,
            seed: field(5).parse().map_err(|e: std::num::ParseIntError| wrap("seed", e.to_string()))?,
            outcome,
            elapsed_ms: field(9).parse().map_err(|e: std::num::ParseIntError| wrap("elapsed_ms", e.to_string()))?,
        });
    }
    Ok(out)
}

pub fn read_records_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_records_csv(&text, path)
}

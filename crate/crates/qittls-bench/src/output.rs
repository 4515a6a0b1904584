//! Deterministic output files: CSV records, plot data, export manifests.
//!
//! The CSV is the single source of truth for a run; plot files are derived
//! artifacts. Numbers are written in scientific notation with 6 significant
//! digits, so identical runs produce identical bytes. Wall times are never
//! written here — [`write_time_summary`] sends them to stderr.

use anyhow::{bail, Context, Result};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Duration;

use crate::runner::{BenchOutcome, TrialRecord};

/// Scientific notation with 6 significant digits (`1.98512E-2`).
pub fn sci6(x: f64) -> String {
    format!("{x:.5E}")
}

pub const CSV_HEADER: &str = "problem,m,d,method,trial,err_kind,rel_err,seed,status";

pub fn csv_line(rec: &TrialRecord) -> String {
    let (err_field, status) = match &rec.rel_err {
        Ok(v) => (sci6(*v), "ok".to_string()),
        Err(tag) => ("NA".to_string(), tag.clone()),
    };
    format!(
        "{},{},{},{},{},{},{},{},{}",
        rec.problem,
        rec.m,
        rec.d,
        rec.method.label(),
        rec.trial,
        rec.err_kind.label(),
        err_field,
        rec.seed,
        status
    )
}

/// Writes the record CSV: header row, then one line per record.
pub fn emit_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for rec in records {
        text.push_str(&csv_line(rec));
        text.push('\n');
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// A parsed CSV row; used to check that emitted files round-trip.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedRecord {
    pub problem: String,
    pub m: usize,
    pub d: usize,
    pub method: String,
    pub trial: usize,
    pub err_kind: String,
    pub rel_err: Option<f64>,
    pub seed: u64,
    pub status: String,
}

pub fn parse_csv(text: &str) -> Result<Vec<ParsedRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => bail!("bad header: {other:?}"),
    }
    let mut out = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            bail!("line {}: expected 9 fields, got {}", lineno + 2, fields.len());
        }
        out.push(ParsedRecord {
            problem: fields[0].to_string(),
            m: fields[1].parse()?,
            d: fields[2].parse()?,
            method: fields[3].to_string(),
            trial: fields[4].parse()?,
            err_kind: fields[5].to_string(),
            rel_err: if fields[6] == "NA" {
                None
            } else {
                Some(fields[6].parse()?)
            },
            seed: fields[7].parse()?,
            status: fields[8].to_string(),
        });
    }
    Ok(out)
}

/// Writes the plot files next to the CSV: `<stem>_decay.txt` with
/// `(index, sigma)` rows and `<stem>_solution.txt` with
/// `(index, reference, <method columns>)` rows.
pub fn emit_plot_data(outcome: &BenchOutcome, csv_path: &Path) -> Result<()> {
    let stem = csv_path.with_extension("");
    let stem = stem.to_string_lossy();

    let decay_path = format!("{stem}_decay.txt");
    let mut text = String::from("# index sigma\n");
    for (i, s) in outcome.decay.iter().enumerate() {
        text.push_str(&format!("{} {}\n", i + 1, sci6(*s)));
    }
    std::fs::write(&decay_path, text).with_context(|| format!("writing {decay_path}"))?;

    let solution_path = format!("{stem}_solution.txt");
    let mut header = format!("# index {}", outcome.overlay.reference_label);
    for (method, _) in &outcome.overlay.columns {
        header.push(' ');
        header.push_str(method.label());
    }
    let mut text = header;
    text.push('\n');
    for i in 0..outcome.overlay.reference.len() {
        let mut line = format!("{} {}", i + 1, sci6(outcome.overlay.reference[i]));
        for (_, x) in &outcome.overlay.columns {
            line.push(' ');
            line.push_str(&sci6(x[i]));
        }
        text.push_str(&line);
        text.push('\n');
    }
    std::fs::write(&solution_path, text).with_context(|| format!("writing {solution_path}"))?;
    Ok(())
}

/// Per-method wall-time summary on stderr. Timing is the one quantity that
/// cannot be byte-reproducible, so it never reaches the output files.
pub fn write_time_summary(records: &[TrialRecord], mut sink: impl Write) -> Result<()> {
    let mut by_method: BTreeMap<&'static str, Vec<Duration>> = BTreeMap::new();
    for rec in records {
        by_method.entry(rec.method.label()).or_default().push(rec.wall);
    }
    for (label, times) in by_method {
        let total: Duration = times.iter().sum();
        let mean = total / times.len() as u32;
        let max = times.iter().max().copied().unwrap_or_default();
        writeln!(
            sink,
            "time {label}: mean {:.4}s max {:.4}s over {} calls",
            mean.as_secs_f64(),
            max.as_secs_f64(),
            times.len()
        )?;
    }
    Ok(())
}

/// Writes a problem export manifest (`key = value` lines).
pub fn emit_manifest(
    path: &Path,
    name: &str,
    m: usize,
    n: usize,
    eta: f64,
    seed: u64,
) -> Result<()> {
    let text = format!(
        "name = {name}\nm = {m}\nn = {n}\neta = {}\nseed = {seed}\n",
        sci6(eta)
    );
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Column count of the solution overlay file: index + reference + methods.
pub fn overlay_width(methods: usize) -> usize {
    2 + methods
}

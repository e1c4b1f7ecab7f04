//! Result files: number formatting, traces, curves, and run records.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::MetricValues;
use crate::types::SearchTrace;

/// Format like C's `%g`: 6 significant digits, trailing zeros dropped,
/// scientific notation for exponents below -4 or from 6 upwards.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        trim_zeros(format!("{:.*}", (5 - exp) as usize, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Write `rows` as CSV with `\n` line endings.
pub(crate) fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Plot-ready score curve: `subset_size,mean_score,score_sd`, largest size first.
pub fn emit_curve(trace: &SearchTrace, out: impl AsRef<Path>) -> Result<()> {
    if trace.is_empty() {
        return Err(Error::domain("cannot emit a curve for an empty trace"));
    }
    let rows: Vec<Vec<String>> = trace
        .iter()
        .rev()
        .map(|(size, e)| vec![size.to_string(), fmt_num(e.mean_score()), fmt_num(e.score_sd())])
        .collect();
    write_table(out.as_ref(), &["subset_size", "mean_score", "score_sd"], &rows)
}

#[derive(Serialize)]
struct TraceLine<'a> {
    size: usize,
    fold_scores: &'a [f64],
    mean_score: f64,
    aggregated_ranking: &'a [usize],
    /// Logical clock: position of the evaluation within the search.
    timestamp: usize,
}

/// One JSON object per evaluated size, in evaluation order.
pub fn write_trace(trace: &SearchTrace, out: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    for size in trace.evaluation_order() {
        let e = trace.get(size).expect("size from the trace");
        let line = TraceLine {
            size,
            fold_scores: &e.per_fold_scores,
            mean_score: e.mean_score(),
            aggregated_ranking: e.aggregated_ranking.order(),
            timestamp: e.sequence,
        };
        serde_json::to_writer(&mut buf, &line)?;
        buf.push(b'\n');
    }
    fs::write(out, buf)?;
    Ok(())
}

/// Outcome of one (dataset, strategy, repetition) run, scored on its outer test fold.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub dataset: String,
    pub strategy: String,
    pub ranker: String,
    pub repetition: usize,
    /// Selected feature indices, ascending.
    pub selected: Vec<usize>,
    pub eval_count: usize,
    pub metrics: MetricValues,
    pub wall_time: f64,
}

impl RunRecord {
    pub fn selected_size(&self) -> usize {
        self.selected.len()
    }
}

pub(crate) const RECORD_COLUMNS: [&str; 11] = [
    "dataset",
    "strategy",
    "ranker",
    "repetition",
    "selected_size",
    "selected_indices",
    "eval_count",
    "accuracy",
    "kappa",
    "macro_recall",
    "g_mean",
];

/// `records.csv` holds everything except wall time, which goes to
/// `timings.csv` so the former is reproducible byte for byte.
pub(crate) fn write_records(dir: &Path, records: &[RunRecord]) -> Result<()> {
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let indices: Vec<String> = r.selected.iter().map(usize::to_string).collect();
            vec![
                r.dataset.clone(),
                r.strategy.clone(),
                r.ranker.clone(),
                r.repetition.to_string(),
                r.selected_size().to_string(),
                indices.join(" "),
                r.eval_count.to_string(),
                fmt_num(r.metrics.accuracy),
                fmt_num(r.metrics.kappa),
                fmt_num(r.metrics.macro_recall),
                fmt_num(r.metrics.g_mean),
            ]
        })
        .collect();
    write_table(&dir.join("records.csv"), &RECORD_COLUMNS, &rows)?;
    let timings: Vec<Vec<String>> = records
        .iter()
        .map(|r| vec![r.dataset.clone(), r.strategy.clone(), r.ranker.clone(), r.repetition.to_string(), fmt_num(r.wall_time)])
        .collect();
    write_table(&dir.join("timings.csv"), &["dataset", "strategy", "ranker", "repetition", "wall_time"], &timings)
}

/// Read `records.csv` from `path`, or from `path/records.csv` for a directory.
/// Wall times are filled in from a sibling `timings.csv` when present.
pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let path = path.as_ref();
    let file = if path.is_dir() { path.join("records.csv") } else { path.to_path_buf() };
    let mut reader = csv::Reader::from_path(&file)?;
    let header = reader.headers()?.clone();
    if header.iter().ne(RECORD_COLUMNS) {
        return Err(Error::Config(format!("{}: unexpected columns", file.display())));
    }
    let bad = |line: usize, column: usize, what: &str| Error::Ingestion {
        path: file.clone(),
        row: line,
        column: column + 1,
        message: format!("invalid {what}"),
    };
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let int = |j: usize| row[j].parse::<usize>().map_err(|_| bad(line, j, RECORD_COLUMNS[j]));
        let real = |j: usize| row[j].parse::<f64>().map_err(|_| bad(line, j, RECORD_COLUMNS[j]));
        let selected = row[5]
            .split_whitespace()
            .map(|s| s.parse::<usize>().map_err(|_| bad(line, 5, "selected_indices")))
            .collect::<Result<Vec<_>>>()?;
        if selected.len() != int(4)? {
            return Err(bad(line, 4, "selected_size"));
        }
        records.push(RunRecord {
            dataset: row[0].to_string(),
            strategy: row[1].to_string(),
            ranker: row[2].to_string(),
            repetition: int(3)?,
            selected,
            eval_count: int(6)?,
            metrics: MetricValues { accuracy: real(7)?, kappa: real(8)?, macro_recall: real(9)?, g_mean: real(10)? },
            wall_time: f64::NAN,
        });
    }
    let timings = file.with_file_name("timings.csv");
    if timings.exists() {
        let mut reader = csv::Reader::from_path(&timings)?;
        for (record, row) in records.iter_mut().zip(reader.records()) {
            let row = row?;
            if row.get(0) == Some(record.dataset.as_str()) && row.get(1) == Some(record.strategy.as_str()) {
                record.wall_time = row.get(4).and_then(|t| t.parse().ok()).unwrap_or(f64::NAN);
            }
        }
    }
    Ok(records)
}

/// Replace characters that are awkward in file names.
pub(crate) fn file_token(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect()
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

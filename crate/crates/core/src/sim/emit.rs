//! Result files: per-step traces (CSV or JSON lines), one JSON line per
//! batch run, and a per-look-ahead batch table.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::feasibility::Regime;

use super::{BatchSummary, EpisodeResult, RunRecord, TraceRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    JsonLines,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::JsonLines),
            _ => Err(format!("unknown format `{s}` (expected `csv` or `jsonl`)")),
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

pub fn trace_header(queue_stops: usize) -> Vec<String> {
    let mut h: Vec<String> = ["k", "position_m", "speed", "recent_stop", "capacity_free"]
        .map(String::from)
        .to_vec();
    h.extend((1..=queue_stops).map(|m| format!("n_stop_{m}")));
    h.extend(["stage_cost", "regime", "solve_us"].map(String::from));
    h
}

/// Writes the trace as CSV. Floats use the shortest representation that
/// parses back to the same value.
pub fn write_trace_csv(result: &EpisodeResult, queue_stops: usize, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(trace_header(queue_stops)).map_err(|e| csv_err(path, e))?;
    for r in &result.trace {
        let mut rec = vec![
            r.k.to_string(),
            r.position_m.to_string(),
            r.speed.to_string(),
            r.recent_stop.to_string(),
            r.capacity_free.to_string(),
        ];
        rec.extend(r.queues.iter().map(u32::to_string));
        rec.push(r.stage_cost.to_string());
        rec.push(r.regime.as_str().to_string());
        rec.push(r.solve_us.to_string());
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = rd.headers().map_err(|e| csv_err(path, e))?.clone();
    let stops = header.iter().filter(|h| h.starts_with("n_stop_")).count();
    if header.iter().collect::<Vec<_>>() != trace_header(stops) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            message: format!("unexpected header {header:?}"),
        });
    }
    let bad = |line: usize, what: &str| Error::Parse {
        path: path.to_path_buf(),
        message: format!("row {line}: bad {what}"),
    };
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let f = |j: usize| rec.get(j).unwrap_or_default();
        macro_rules! parse {
            ($j:expr, $name:expr) => {
                f($j).parse().map_err(|_| bad(i + 1, $name))?
            };
        }
        let queues = (0..stops)
            .map(|m| f(5 + m).parse().map_err(|_| bad(i + 1, "queue")))
            .collect::<Result<_>>()?;
        rows.push(TraceRow {
            k: parse!(0, "k"),
            position_m: parse!(1, "position_m"),
            speed: parse!(2, "speed"),
            recent_stop: parse!(3, "recent_stop"),
            capacity_free: parse!(4, "capacity_free"),
            queues,
            stage_cost: parse!(5 + stops, "stage_cost"),
            regime: Regime::parse(f(6 + stops)).ok_or_else(|| bad(i + 1, "regime"))?,
            solve_us: parse!(7 + stops, "solve_us"),
        });
    }
    Ok(rows)
}

fn write_lines<T: Serialize>(items: impl IntoIterator<Item = T>, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    for item in items {
        serde_json::to_writer(&mut w, &item).map_err(|e| Error::io(path, e.into()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_trace_jsonl(result: &EpisodeResult, path: &Path) -> Result<()> {
    write_lines(&result.trace, path)
}

pub fn write_trace(result: &EpisodeResult, queue_stops: usize, format: Format, path: &Path) -> Result<()> {
    match format {
        Format::Csv => write_trace_csv(result, queue_stops, path),
        Format::JsonLines => write_trace_jsonl(result, path),
    }
}

/// One JSON object per (policy, look-ahead, seed).
pub fn write_runs_jsonl(records: &[RunRecord], path: &Path) -> Result<()> {
    write_lines(records, path)
}

/// One row per policy with mean areas, improvements and solver statistics.
pub fn write_batch_csv(summary: &BatchSummary, queue_stops: usize, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut header = vec!["policy".to_string(), "lookahead".to_string(), "runs".to_string()];
    header.extend((1..=queue_stops).map(|m| format!("area_stop_{m}")));
    header.extend((1..=queue_stops).map(|m| format!("improvement_pct_stop_{m}")));
    header.extend(["timing_mean_us", "timing_max_us", "mean_expanded_nodes", "mean_final_k"].map(String::from));
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    if summary.runs == 0 {
        return w.flush().map_err(|e| Error::io(path, e));
    }

    let mut base = vec!["baseline".to_string(), String::new(), summary.runs.to_string()];
    base.extend(summary.baseline.mean.iter().map(f64::to_string));
    base.extend((0..queue_stops).map(|_| String::new()));
    let final_k = super::mean(summary.baseline_final_k.iter().map(|&k| f64::from(k)));
    base.extend([String::new(), String::new(), String::new(), final_k.to_string()]);
    w.write_record(&base).map_err(|e| csv_err(path, e))?;

    for la in &summary.lookaheads {
        let mut rec = vec![format!("dp-{}", la.lookahead), la.lookahead.to_string(), summary.runs.to_string()];
        rec.extend(la.area.mean.iter().map(f64::to_string));
        rec.extend(la.improvement_pct.iter().map(f64::to_string));
        rec.extend([
            la.timing_mean_us.to_string(),
            la.timing_max_us.to_string(),
            la.mean_expanded_nodes.to_string(),
            la.mean_final_k.to_string(),
        ]);
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_summary_json(summary: &BatchSummary, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    let mut compact = summary.clone();
    compact.records.clear();
    serde_json::to_writer_pretty(&mut w, &compact).map_err(|e| Error::io(path, e.into()))?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

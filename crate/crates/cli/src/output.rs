use std::io::Write;
use std::path::Path;

use fastukf::FilterKind;

use crate::error::{CliError, Result};
use crate::harness::RunRecord;
use crate::summary::SummaryStats;

/// `{:e}` is Rust's shortest round-trip form in scientific notation.
fn sci(x: f64) -> String {
    format!("{x:e}")
}

fn width(records: &[RunRecord]) -> usize {
    records.first().map_or(0, |r| r.errors.len())
}

pub fn write_records<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let k = width(records);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["run_id".to_string(), "filter".into(), "t_s".into()];
    header.extend((1..=k).map(|i| format!("err_{i}")));
    header.push("step_time_ns".into());
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![r.run_id.to_string(), r.filter.tag().to_string(), sci(r.t)];
        row.extend(r.errors.iter().map(|e| sci(*e)));
        row.push(sci(r.step_time_ns as f64));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| CliError::io("<records>", e))?;
    Ok(())
}

pub fn write_summary<W: Write>(out: W, stats: &[SummaryStats]) -> Result<()> {
    let k = stats.first().map_or(0, |s| s.rms.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["filter".to_string()];
    header.extend((1..=k).map(|i| format!("rms_{i}")));
    header.extend(["time_avg_err", "mean_step_ns", "median_step_ns", "runs"].map(String::from));
    w.write_record(&header)?;
    for s in stats {
        let mut row = vec![s.filter.tag().to_string()];
        row.extend(s.rms.iter().map(|e| sci(*e)));
        row.extend([sci(s.time_avg_err), sci(s.mean_step_ns), sci(s.median_step_ns), s.runs.to_string()]);
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| CliError::io("<summary>", e))?;
    Ok(())
}

fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path).map_err(|e| CliError::io(path, e))
}

pub fn emit_records_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    write_records(create(path)?, records)
}

pub fn emit_summary_csv(stats: &[SummaryStats], path: &Path) -> Result<()> {
    write_summary(create(path)?, stats)
}

fn bad(msg: String) -> CliError {
    CliError::Parse {
        line: None,
        column: None,
        field: None,
        message: msg,
    }
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| bad(format!("bad number '{s}'")))
}

pub fn read_records_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let mut rd = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let n = row.len();
        let filter: FilterKind = row[1].parse().map_err(|e: fastukf::Error| bad(e.to_string()))?;
        out.push(RunRecord {
            run_id: num(&row[0])?,
            filter,
            t: num(&row[2])?,
            errors: (3..n - 1).map(|i| num(&row[i])).collect::<Result<_>>()?,
            step_time_ns: num::<f64>(&row[n - 1])? as u64,
        });
    }
    Ok(out)
}

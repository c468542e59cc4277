use std::collections::BTreeMap;

use fastukf::FilterKind;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::harness::RunRecord;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub filter: FilterKind,
    /// RMS of each error component over all epochs and runs.
    pub rms: Vec<f64>,
    /// Mean over all epochs and runs of the position-error norm.
    pub time_avg_err: f64,
    pub mean_step_ns: f64,
    pub median_step_ns: f64,
    pub runs: usize,
}

fn position_norm(r: &RunRecord, position_dims: usize) -> f64 {
    r.errors.iter().take(position_dims).map(|e| e * e).sum::<f64>().sqrt()
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => values[n / 2],
        _ => 0.5 * (values[n / 2 - 1] + values[n / 2]),
    }
}

/// Per-filter statistics, ordered by filter.
///
/// `position_dims` leading error components make up the position-error norm.
pub fn summarize(records: &[RunRecord], position_dims: usize) -> Result<Vec<SummaryStats>> {
    if records.is_empty() {
        return Err(CliError::EmptyInput);
    }
    let mut groups: BTreeMap<FilterKind, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.filter).or_default().push(r);
    }
    Ok(groups
        .into_iter()
        .map(|(filter, recs)| {
            let n = recs.len() as f64;
            let k = recs[0].errors.len();
            let rms = (0..k)
                .map(|i| (recs.iter().map(|r| r.errors[i] * r.errors[i]).sum::<f64>() / n).sqrt())
                .collect();
            let time_avg_err = recs.iter().map(|r| position_norm(r, position_dims)).sum::<f64>() / n;
            let mut times: Vec<f64> = recs.iter().map(|r| r.step_time_ns as f64).collect();
            let mean_step_ns = times.iter().sum::<f64>() / n;
            let median_step_ns = median(&mut times);
            let mut runs: Vec<u64> = recs.iter().map(|r| r.run_id).collect();
            runs.sort_unstable();
            runs.dedup();
            SummaryStats {
                filter,
                rms,
                time_avg_err,
                mean_step_ns,
                median_step_ns,
                runs: runs.len(),
            }
        })
        .collect())
}

/// Time-averaged position error of every run, per filter, in run order.
pub fn run_time_averages(records: &[RunRecord], position_dims: usize) -> BTreeMap<FilterKind, Vec<f64>> {
    let mut acc: BTreeMap<(FilterKind, u64), (f64, usize)> = BTreeMap::new();
    for r in records {
        let e = acc.entry((r.filter, r.run_id)).or_default();
        e.0 += position_norm(r, position_dims);
        e.1 += 1;
    }
    let mut out: BTreeMap<FilterKind, Vec<f64>> = BTreeMap::new();
    for ((filter, _), (sum, n)) in acc {
        out.entry(filter).or_default().push(sum / n as f64);
    }
    out
}

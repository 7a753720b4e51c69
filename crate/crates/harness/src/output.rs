//! Result files: per-run CSV, `key=value` summaries, sweep CSV and gnuplot data.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::experiment::ExperimentResult;
use crate::HarnessError;

/// One row per run: `run,return,length,terminated,planning_events`.
pub fn runs_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("run,return,length,terminated,planning_events\n");
    for r in &result.runs {
        let _ = writeln!(out, "{},{},{},{},{}", r.index, r.total_reward, r.length, r.terminated, r.planning_events);
    }
    out
}

/// `key=value` summary: the full config followed by the statistics.
pub fn summary(result: &ExperimentResult) -> String {
    let mut out = String::new();
    for (k, v) in result.config.to_pairs() {
        let _ = writeln!(out, "{k}={v}");
    }
    let _ = writeln!(out, "mean={}", result.mean);
    let _ = writeln!(out, "std_error={}", result.std_error);
    let _ = writeln!(out, "count={}", result.runs.len());
    let _ = writeln!(out, "wall_clock_secs={:.3}", result.wall_clock_secs);
    out
}

/// Parses a summary back into ordered key/value pairs.
pub fn parse_summary(body: &str) -> Result<Vec<(String, String)>, HarnessError> {
    body.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| HarnessError::Format(format!("summary line '{l}' has no '='")))
        })
        .collect()
}

/// Per-run returns from a runs CSV.
pub fn parse_runs_csv(body: &str) -> Result<Vec<f64>, HarnessError> {
    body.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split(',')
                .nth(1)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| HarnessError::Format(format!("bad runs row '{l}'")))
        })
        .collect()
}

/// One row per grid point: `agent,coefficient,mean,std_error,count,best`.
pub fn sweep_csv(results: &[ExperimentResult], best: Option<usize>) -> String {
    let mut out = String::from("agent,coefficient,mean,std_error,count,best\n");
    for (i, r) in results.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.config.agent,
            r.config.sweep_coefficient(),
            r.mean,
            r.std_error,
            r.runs.len(),
            best == Some(i)
        );
    }
    out
}

/// Whitespace-separated `coefficient mean std_error` rows for gnuplot's
/// `with yerrorlines`.
pub fn sweep_gnuplot(results: &[ExperimentResult]) -> String {
    let mut out = String::new();
    if let Some(first) = results.first() {
        let _ = writeln!(out, "# {} {}: coefficient mean std_error", first.config.benchmark, first.config.agent);
    }
    for r in results {
        let _ = writeln!(out, "{} {} {}", r.config.sweep_coefficient(), r.mean, r.std_error);
    }
    out
}

pub fn write(path: &Path, body: &str) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    fs::write(path, body).map_err(|e| HarnessError::io(path, e))
}

/// Writes `<stem>.csv` and `<stem>.summary` next to `out`.
pub fn write_experiment(out: &Path, result: &ExperimentResult) -> Result<(), HarnessError> {
    write(&out.with_extension("csv"), &runs_csv(result))?;
    write(&out.with_extension("summary"), &summary(result))
}

//! Run reports: a deterministic section that is byte-identical across reruns
//! of the same scenario, and a separate wall-clock section.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::trace::SeriesPoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inapplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskResult {
    pub task: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub data: Value,
    /// Refinement series, also written as CSV next to the report.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<SeriesPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportBody {
    pub tool_version: String,
    pub scenario_hash: String,
    pub seed: u64,
    pub results: Vec<TaskResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskTiming {
    pub task: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub tasks: Vec<TaskTiming>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub deterministic: ReportBody,
    pub timing: Timing,
}

impl RunReport {
    pub fn succeeded(&self) -> bool {
        self.deterministic
            .results
            .iter()
            .all(|r| r.verdict != Verdict::Fail)
    }

    /// The deterministic section as pretty JSON.
    pub fn deterministic_json(&self) -> String {
        serde_json::to_string_pretty(&self.deterministic).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn series_csv(series: &[SeriesPoint]) -> String {
    let mut out = String::from("resolution,value\n");
    for pt in series {
        writeln!(out, "{},{}", pt.resolution, pt.value).expect("writing to a string");
    }
    out
}

/// Where the series of the `k`-th result goes, given the report path.
pub fn series_path(report: &Path, k: usize, count: usize) -> PathBuf {
    if count == 1 {
        report.with_extension("csv")
    } else {
        report.with_extension(format!("{k}.csv"))
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the report as JSON and each refinement series as CSV. Returns the
/// paths written.
pub fn emit_report(report: &RunReport, path: &Path) -> Result<Vec<PathBuf>> {
    write(path, &report.to_json())?;
    let mut written = vec![path.to_path_buf()];
    let with_series: Vec<&TaskResult> = report
        .deterministic
        .results
        .iter()
        .filter(|r| !r.series.is_empty())
        .collect();
    for (k, r) in with_series.iter().enumerate() {
        let csv = series_path(path, k, with_series.len());
        write(&csv, &series_csv(&r.series))?;
        written.push(csv);
    }
    Ok(written)
}

pub fn read_report(path: &Path) -> Result<RunReport> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

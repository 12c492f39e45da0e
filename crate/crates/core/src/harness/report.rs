use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ComparisonTable, ExperimentConfig, SweepTable};
use crate::error::{Error, Result};
use crate::format::sig9;
use crate::qagent::{CurvePoint, QTable};
use crate::workload::checksum_of;

pub const COMPARISON_HEADER: &str =
    "policy,mean_completion_time,makespan,resource_utilization,tasks_completed,tasks_total,truncated,rank,workload_checksum";
pub const SWEEP_HEADER: &str =
    "alpha,mean_completion_time,resource_utilization,makespan,tasks_completed,truncated";
pub const REWARD_CURVE_HEADER: &str = "episode,epsilon,total_reward,decisions";

/// Marker written in place of a mean when no task completed.
const NO_DATA: &str = "NA";

/// Everything written to `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub config: ExperimentConfig,
    pub config_checksum: String,
    pub workload_checksum: String,
    pub comparison: Option<ComparisonTable>,
    pub sweep: Option<SweepTable>,
    pub reward_curve: Option<Vec<CurvePoint>>,
    /// SHA-256 of `qtable.csv`, when a table was written.
    pub qtable_checksum: Option<String>,
}

impl Report {
    pub fn new(config: &ExperimentConfig, workload_checksum: &str) -> Self {
        Report {
            config: config.clone(),
            config_checksum: config.checksum(),
            workload_checksum: workload_checksum.to_string(),
            comparison: None,
            sweep: None,
            reward_curve: None,
            qtable_checksum: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("invalid report: {e}")))
    }
}

fn mean_cell(v: Option<f64>) -> String {
    v.map(sig9).unwrap_or_else(|| NO_DATA.to_string())
}

pub fn comparison_csv(table: &ComparisonTable) -> String {
    let mut out = format!("{COMPARISON_HEADER}\n");
    for row in &table.rows {
        let r = &row.report;
        let m = &r.metrics;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.policy,
            mean_cell(m.mean_completion_time),
            m.makespan,
            sig9(m.resource_utilization),
            m.tasks_completed,
            m.tasks_total,
            m.truncated,
            row.rank,
            r.workload_checksum
        )
        .expect("String write");
    }
    out
}

pub fn sweep_csv(table: &SweepTable) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for row in &table.rows {
        let m = &row.metrics;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            sig9(row.alpha),
            mean_cell(m.mean_completion_time),
            sig9(m.resource_utilization),
            m.makespan,
            m.tasks_completed,
            m.truncated
        )
        .expect("String write");
    }
    out
}

pub fn reward_curve_csv(curve: &[CurvePoint]) -> String {
    let mut out = format!("{REWARD_CURVE_HEADER}\n");
    for p in curve {
        writeln!(out, "{},{},{},{}", p.episode, sig9(p.epsilon), sig9(p.total_reward), p.decisions)
            .expect("String write");
    }
    out
}

fn write(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Writes `comparison.csv`, `sweep.csv`, `reward_curve.csv`, and `qtable.csv`
/// for whichever parts are present, then `report.json`. Returns the paths
/// written, in that order.
pub fn emit_reports(report: &mut Report, table: Option<&QTable>, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    if let Some(c) = &report.comparison {
        write(dir, "comparison.csv", &comparison_csv(c), &mut written)?;
    }
    if let Some(s) = &report.sweep {
        write(dir, "sweep.csv", &sweep_csv(s), &mut written)?;
    }
    if let Some(curve) = &report.reward_curve {
        write(dir, "reward_curve.csv", &reward_curve_csv(curve), &mut written)?;
    }
    if let Some(table) = table {
        let csv = table.to_csv();
        report.qtable_checksum = Some(checksum_of(&csv));
        write(dir, "qtable.csv", &csv, &mut written)?;
    }
    write(dir, "report.json", &report.to_json(), &mut written)?;
    Ok(written)
}

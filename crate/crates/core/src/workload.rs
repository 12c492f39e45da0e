//! Workload traces: a six-column CSV schema, a seeded synthetic generator,
//! and validation shared by both.
//!
//! Trace format (`\n` line endings, no quoting):
//!
//! ```text
//! task_id,arrival_time,duration,cpu_request,mem_request,priority
//! 0,0,12,2,4,3
//! ```
//!
//! `arrival_time` and `duration` are integer ticks (`duration >= 1`), the two
//! requests are positive resource units, and `priority` is in `0..=4` with 4
//! the most urgent. Columns after the sixth (e.g. a recorded scheduler
//! decision) are ignored.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Exp;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng::{self, Stream};
use crate::sim::{Task, MAX_PRIORITY};

pub const TRACE_HEADER: [&str; 6] = [
    "task_id",
    "arrival_time",
    "duration",
    "cpu_request",
    "mem_request",
    "priority",
];

/// Bundled 200-task sample trace.
pub const SAMPLE_TRACE: &str = include_str!("../data/sample_trace.csv");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkloadSource {
    Trace(PathBuf),
    Synthetic(SynthParams),
    Inline,
}

/// A validated task list sorted by `(arrival_time, id)`.
#[derive(Debug, Clone)]
pub struct Workload {
    tasks: Vec<Task>,
    source: WorkloadSource,
    checksum: String,
}

impl PartialEq for Workload {
    fn eq(&self, other: &Self) -> bool {
        self.tasks == other.tasks
    }
}

impl Workload {
    pub fn from_tasks(mut tasks: Vec<Task>, source: WorkloadSource) -> Result<Self> {
        let mut seen = HashSet::with_capacity(tasks.len());
        for (i, task) in tasks.iter().enumerate() {
            task.validate().map_err(|message| Error::Validation { row: i + 1, message })?;
            if !seen.insert(task.id) {
                return Err(Error::Validation {
                    row: i + 1,
                    message: format!("duplicate task id {}", task.id),
                });
            }
        }
        tasks.sort_by_key(|t| (t.arrival_time, t.id));
        let checksum = checksum_of(&canonical_csv(&tasks));
        Ok(Workload { tasks, source, checksum })
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn source(&self) -> &WorkloadSource {
        &self.source
    }

    /// Hex SHA-256 of the canonical CSV serialization.
    pub fn checksum(&self) -> &str {
        &self.checksum
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn to_csv(&self) -> String {
        canonical_csv(&self.tasks)
    }

    pub fn bundled_sample() -> Workload {
        parse_trace_str(SAMPLE_TRACE, WorkloadSource::Inline).expect("bundled sample trace is valid")
    }
}

pub(crate) fn checksum_of(bytes: &str) -> String {
    hex::encode(Sha256::digest(bytes.as_bytes()))
}

fn canonical_csv(tasks: &[Task]) -> String {
    let mut out = TRACE_HEADER.join(",");
    out.push('\n');
    for t in tasks {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            t.id, t.arrival_time, t.duration, t.cpu_req, t.mem_req, t.priority
        )
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn parse_trace(path: impl AsRef<Path>) -> Result<Workload> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::InvalidData => Error::Format(format!("{} is not UTF-8", path.display())),
        _ => Error::io(path, e),
    })?;
    parse_trace_str(&text, WorkloadSource::Trace(path.to_path_buf()))
}

pub fn parse_trace_str(text: &str, source: WorkloadSource) -> Result<Workload> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let header = reader
        .headers()
        .map_err(|e| Error::Format(format!("unreadable header: {e}")))?;
    if header.len() < TRACE_HEADER.len() || header.iter().zip(TRACE_HEADER).any(|(got, want)| got != want) {
        return Err(Error::Format(format!(
            "missing or malformed header, expected `{}`",
            TRACE_HEADER.join(",")
        )));
    }

    let mut tasks = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::Validation { row, message: e.to_string() })?;
        tasks.push(parse_row(&record, row)?);
    }
    Workload::from_tasks(tasks, source)
}

fn parse_row(record: &csv::StringRecord, row: usize) -> Result<Task> {
    let invalid = |message: String| Error::Validation { row, message };
    if record.len() < TRACE_HEADER.len() {
        return Err(invalid(format!(
            "expected {} fields, found {}",
            TRACE_HEADER.len(),
            record.len()
        )));
    }
    let int = |col: usize| -> Result<i64> {
        record[col]
            .parse::<i64>()
            .map_err(|_| invalid(format!("{}: `{}` is not an integer", TRACE_HEADER[col], &record[col])))
    };
    let real = |col: usize| -> Result<f64> {
        record[col]
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| invalid(format!("{}: `{}` is not a number", TRACE_HEADER[col], &record[col])))
    };

    let id = int(0)?;
    let arrival = int(1)?;
    let duration = int(2)?;
    let cpu = real(3)?;
    let mem = real(4)?;
    let priority = int(5)?;

    if id < 0 {
        return Err(invalid(format!("task_id {id} is negative")));
    }
    if arrival < 0 {
        return Err(invalid(format!("arrival_time {arrival} is negative")));
    }
    if duration <= 0 {
        return Err(invalid(format!("duration {duration} must be positive")));
    }
    if cpu <= 0.0 {
        return Err(invalid(format!("cpu_request {cpu} must be positive")));
    }
    if mem <= 0.0 {
        return Err(invalid(format!("mem_request {mem} must be positive")));
    }
    if !(0..=MAX_PRIORITY as i64).contains(&priority) {
        return Err(invalid(format!("priority {priority} outside [0, {MAX_PRIORITY}]")));
    }
    Ok(Task {
        id: id as u64,
        arrival_time: arrival as u64,
        duration: duration as u64,
        cpu_req: cpu,
        mem_req: mem,
        priority: priority as u8,
    })
}

pub fn write_trace(workload: &Workload, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, workload.to_csv()).map_err(|e| Error::io(path, e))
}

/// Parameters for [`generate_synthetic`].
///
/// Arrivals follow a Poisson process with `arrival_rate` tasks per tick
/// (exponential inter-arrival gaps, floored to whole ticks). Durations and
/// demands are drawn uniformly from the inclusive integer ranges, priorities
/// from `priority_weights` over levels `0..=4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthParams {
    pub task_count: usize,
    pub arrival_rate: f64,
    pub duration_range: (u64, u64),
    pub cpu_range: (u32, u32),
    pub mem_range: (u32, u32),
    #[serde(default = "uniform_priorities")]
    pub priority_weights: [f64; 5],
    pub seed: u64,
}

fn uniform_priorities() -> [f64; 5] {
    [1.0; 5]
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            task_count: 200,
            arrival_rate: 1.0,
            duration_range: (5, 30),
            cpu_range: (1, 4),
            mem_range: (1, 8),
            priority_weights: uniform_priorities(),
            seed: 0,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.arrival_rate.is_finite() && self.arrival_rate > 0.0) {
            return bad(format!("arrival_rate must be positive, got {}", self.arrival_rate));
        }
        let (dmin, dmax) = self.duration_range;
        if dmin < 1 || dmin > dmax {
            return bad(format!("duration_range [{dmin}, {dmax}] must be non-empty with min >= 1"));
        }
        for (name, (lo, hi)) in [("cpu_range", self.cpu_range), ("mem_range", self.mem_range)] {
            if lo < 1 || lo > hi {
                return bad(format!("{name} [{lo}, {hi}] must be non-empty with min >= 1"));
            }
        }
        if self.priority_weights.iter().any(|w| !w.is_finite() || *w < 0.0)
            || self.priority_weights.iter().sum::<f64>() <= 0.0
        {
            return bad("priority_weights must be non-negative with a positive sum".into());
        }
        Ok(())
    }
}

pub fn generate_synthetic(params: &SynthParams) -> Result<Workload> {
    params.validate()?;
    let mut rng = rng::stream(params.seed, Stream::Workload);
    let gaps = Exp::new(params.arrival_rate).map_err(|e| Error::Config(e.to_string()))?;
    let priorities = WeightedIndex::new(params.priority_weights).map_err(|e| Error::Config(e.to_string()))?;

    let mut t = 0.0_f64;
    let tasks = (0..params.task_count)
        .map(|i| {
            t += gaps.sample(&mut rng);
            Task {
                id: i as u64,
                arrival_time: t.floor() as u64,
                duration: rng.random_range(params.duration_range.0..=params.duration_range.1),
                cpu_req: rng.random_range(params.cpu_range.0..=params.cpu_range.1) as f64,
                mem_req: rng.random_range(params.mem_range.0..=params.mem_range.1) as f64,
                priority: priorities.sample(&mut rng) as u8,
            }
        })
        .collect();
    Workload::from_tasks(tasks, WorkloadSource::Synthetic(params.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "task_id,arrival_time,duration,cpu_request,mem_request,priority\n";

    fn parse(body: &str) -> Result<Workload> {
        parse_trace_str(&format!("{HEADER}{body}"), WorkloadSource::Inline)
    }

    #[test]
    fn single_row_round_trips_exact_fields() {
        let w = parse("7,3,12,2.5,4,3\n").unwrap();
        assert_eq!(
            w.tasks(),
            &[Task { id: 7, arrival_time: 3, duration: 12, cpu_req: 2.5, mem_req: 4.0, priority: 3 }]
        );
        assert_eq!(w.to_csv(), format!("{HEADER}7,3,12,2.5,4,3\n"));
    }

    #[test]
    fn empty_or_headerless_input_is_a_format_error() {
        assert!(matches!(parse_trace_str("", WorkloadSource::Inline), Err(Error::Format(_))));
        assert!(matches!(
            parse_trace_str("0,0,12,2,4,3\n", WorkloadSource::Inline),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn bad_rows_cite_their_index() {
        let cases = [
            ("0,0,5,1,1,1\n1,0,0,1,1,1\n", 2),
            ("0,0,5,x,1,1\n", 1),
            ("0,0,5,1,-2,1\n", 1),
            ("0,0,5,1,1,5\n", 1),
            ("0,0,5,1,1,1\n1,1,5,1,1,1\n0,2,5,1,1,1\n", 3),
            ("0,0,5,1\n", 1),
        ];
        for (body, want_row) in cases {
            match parse(body) {
                Err(Error::Validation { row, .. }) => assert_eq!(row, want_row, "{body}"),
                other => panic!("{body}: expected validation error, got {other:?}"),
            }
        }
    }

    #[test]
    fn extra_columns_are_ignored_and_rows_sorted() {
        let text = "task_id,arrival_time,duration,cpu_request,mem_request,priority,scheduler_decision\n\
                    5,9,1,1,1,0,accept\n2,9,1,1,1,0,reject\n1,3,1,1,1,0,accept\n";
        let w = parse_trace_str(text, WorkloadSource::Inline).unwrap();
        let ids: Vec<u64> = w.tasks().iter().map(|t| t.id).collect();
        assert_eq!(ids, vec![1, 2, 5]);
    }

    #[test]
    fn synthetic_generation_is_deterministic() {
        let p = SynthParams { seed: 11, ..SynthParams::default() };
        let a = generate_synthetic(&p).unwrap();
        let b = generate_synthetic(&p).unwrap();
        assert_eq!(a.checksum(), b.checksum());
        let c = generate_synthetic(&SynthParams { seed: 12, ..p }).unwrap();
        assert_ne!(a.checksum(), c.checksum());
    }

    #[test]
    fn zero_tasks_gives_empty_workload() {
        let w = generate_synthetic(&SynthParams { task_count: 0, ..SynthParams::default() }).unwrap();
        assert!(w.is_empty());
        assert_eq!(w.to_csv(), HEADER);
    }

    #[test]
    fn mean_inter_arrival_matches_rate() {
        let w = generate_synthetic(&SynthParams { task_count: 1000, arrival_rate: 1.0, seed: 3, ..SynthParams::default() })
            .unwrap();
        let first = w.tasks()[0].arrival_time as f64;
        let last = w.tasks()[999].arrival_time as f64;
        let mean_gap = (last - first) / 999.0;
        assert!((mean_gap - 1.0).abs() <= 0.1, "mean gap {mean_gap}");
    }

    #[test]
    fn invalid_params_are_rejected() {
        let base = SynthParams::default();
        for p in [
            SynthParams { arrival_rate: 0.0, ..base.clone() },
            SynthParams { duration_range: (0, 3), ..base.clone() },
            SynthParams { cpu_range: (4, 2), ..base.clone() },
            SynthParams { mem_range: (0, 2), ..base.clone() },
            SynthParams { priority_weights: [0.0; 5], ..base.clone() },
        ] {
            assert!(matches!(generate_synthetic(&p), Err(Error::Config(_))), "{p:?}");
        }
    }

    #[test]
    fn bundled_sample_reserializes_byte_for_byte() {
        let w = Workload::bundled_sample();
        assert_eq!(w.len(), 200);
        assert_eq!(w.to_csv(), SAMPLE_TRACE);
    }
}

//! Experiment orchestration: policy comparison, learning-rate sweeps, and the
//! CSV/JSON reports they produce.

mod config;
mod metrics;
mod report;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::PolicyKind;
use crate::error::{Error, Result};
use crate::qagent::{self, greedy_policy, QTable, Training};
use crate::sim::{run_episode, EpisodeLog, Policy, SimConfig};
use crate::workload::Workload;

pub use config::{ExperimentConfig, WorkloadSpec};
pub use metrics::{compute_metrics, Metrics};
pub use report::{
    comparison_csv, emit_reports, reward_curve_csv, sweep_csv, Report, COMPARISON_HEADER,
    REWARD_CURVE_HEADER, SWEEP_HEADER,
};

/// Metrics of one policy's evaluation episode, with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub policy: PolicyKind,
    pub metrics: Metrics,
    pub seed: u64,
    pub workload_checksum: String,
    pub config_checksum: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub report: RunReport,
    /// 1-based rank by mean completion time; runs without data rank last.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub workload_checksum: String,
    pub fleet: SimConfig,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn get(&self, policy: PolicyKind) -> Option<&RunReport> {
        self.rows.iter().map(|r| &r.report).find(|r| r.policy == policy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub workload_checksum: String,
    pub rows: Vec<SweepRow>,
}

/// Everything a `compare` run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub table: ComparisonTable,
    pub training: Option<Training>,
}

fn evaluate(
    policy: &mut dyn Policy,
    workload: &Workload,
    config: &ExperimentConfig,
) -> Result<EpisodeLog> {
    let scheme = &config.discretization;
    run_episode(workload.tasks(), policy, &config.fleet, config.seed, |o| {
        qagent::reward(o, scheme)
    })
}

fn train_on(workload: &Workload, config: &ExperimentConfig, hp: &qagent::Hyperparams) -> Result<Training> {
    qagent::train(workload.tasks(), &config.fleet, &config.discretization, hp)
}

/// Greedy (epsilon = 0) evaluation of a trained table.
pub fn evaluate_table(table: &QTable, workload: &Workload, config: &ExperimentConfig) -> Result<EpisodeLog> {
    let mut policy = greedy_policy(table.clone(), config.discretization.clone());
    evaluate(&mut policy, workload, config)
}

/// Trains the agent as configured and returns the training record.
pub fn train_experiment(config: &ExperimentConfig) -> Result<(Workload, Training)> {
    config.validate()?;
    let workload = config.load_workload()?;
    let training = train_on(&workload, config, &config.training_hyperparams())?;
    Ok((workload, training))
}

/// Evaluates every configured policy on the same workload and fleet.
/// The Q policy is trained first, then run greedily.
pub fn compare(config: &ExperimentConfig) -> Result<Comparison> {
    config.validate()?;
    let workload = config.load_workload()?;
    compare_on(&workload, config)
}

pub fn compare_on(workload: &Workload, config: &ExperimentConfig) -> Result<Comparison> {
    let mut policies = config.policies.clone();
    policies.sort();
    policies.dedup();

    let training = if policies.contains(&PolicyKind::QGreedy) {
        Some(train_on(workload, config, &config.training_hyperparams()).map_err(|e| Error::Run {
            policy: PolicyKind::QGreedy.to_string(),
            message: e.to_string(),
        })?)
    } else {
        None
    };

    let config_checksum = config.checksum();
    let reports = policies
        .iter()
        .map(|&kind| {
            let log = match kind.baseline() {
                Some(mut policy) => evaluate(policy.as_mut(), workload, config),
                None => evaluate_table(&training.as_ref().expect("trained above").table, workload, config),
            }
            .map_err(|e| Error::Run {
                policy: kind.to_string(),
                message: e.to_string(),
            })?;
            Ok(RunReport {
                policy: kind,
                metrics: compute_metrics(&log, &config.fleet),
                seed: config.seed,
                workload_checksum: workload.checksum().to_string(),
                config_checksum: config_checksum.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut order: Vec<usize> = (0..reports.len()).collect();
    order.sort_by(|&a, &b| {
        let key = |i: usize| reports[i].metrics.mean_completion_time.unwrap_or(f64::INFINITY);
        key(a).total_cmp(&key(b)).then(a.cmp(&b))
    });
    let mut ranks = vec![0; reports.len()];
    for (rank, i) in order.into_iter().enumerate() {
        ranks[i] = rank + 1;
    }

    let rows = reports
        .into_iter()
        .zip(ranks)
        .map(|(report, rank)| ComparisonRow { report, rank })
        .collect();
    Ok(Comparison {
        table: ComparisonTable {
            workload_checksum: workload.checksum().to_string(),
            fleet: config.fleet.clone(),
            rows,
        },
        training,
    })
}

/// Trains and greedily evaluates one agent per learning rate, all else fixed.
/// Rows are computed in parallel and returned in the requested order.
pub fn sweep_alpha(config: &ExperimentConfig, alphas: &[f64]) -> Result<SweepTable> {
    if alphas.is_empty() {
        return Err(Error::Config("alpha list is empty".into()));
    }
    if let Some(bad) = alphas.iter().find(|&&a| !(a > 0.0 && a <= 1.0)) {
        return Err(Error::Config(format!("alpha {bad} outside (0, 1]")));
    }
    config.validate()?;
    let workload = config.load_workload()?;

    let rows = alphas
        .par_iter()
        .map(|&alpha| {
            let hp = qagent::Hyperparams {
                alpha,
                ..config.training_hyperparams()
            };
            let run_err = |e: Error| Error::Run {
                policy: format!("q-greedy (alpha {alpha})"),
                message: e.to_string(),
            };
            let training = train_on(&workload, config, &hp).map_err(run_err)?;
            let log = evaluate_table(&training.table, &workload, config).map_err(run_err)?;
            Ok(SweepRow {
                alpha,
                metrics: compute_metrics(&log, &config.fleet),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        workload_checksum: workload.checksum().to_string(),
        rows,
    })
}

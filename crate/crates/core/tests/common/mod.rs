#![allow(dead_code)]

use qsched::baselines::PolicyKind;
use qsched::qagent::{greedy_policy, DiscretizationScheme, QTable};
use qsched::sim::{Action, Decision, Episode, Policy, SimConfig, Task};
use qsched::workload::{generate_synthetic, SynthParams, Workload};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A workload with parameters drawn from `seed`, sized to stress the fleet.
pub fn random_workload(seed: u64) -> Workload {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dmin = rng.random_range(1..5);
    let cmax = rng.random_range(1..10);
    let mmax = rng.random_range(1..20);
    let params = SynthParams {
        task_count: rng.random_range(0..80),
        arrival_rate: rng.random_range(0.2..5.0),
        duration_range: (dmin, dmin + rng.random_range(0..10)),
        cpu_range: (1, cmax),
        mem_range: (1, mmax),
        seed,
        ..SynthParams::default()
    };
    generate_synthetic(&params).expect("valid params")
}

pub fn random_fleet(seed: u64) -> SimConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut fleet = SimConfig::new(rng.random_range(1..6), 8.0, 16.0);
    fleet.max_attempts_per_tick = rng.random_range(1..10);
    fleet
}

/// A table with random values, so the greedy policy exercises every action.
pub fn random_table(seed: u64) -> QTable {
    let scheme = DiscretizationScheme::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = QTable::zeros(scheme.state_count(), Action::COUNT);
    for s in 0..scheme.state_count() {
        for v in table.row_mut(qsched::qagent::StateId(s)) {
            *v = -rng.random_range(0.0..10.0);
        }
    }
    table
}

pub fn policy_for(kind: PolicyKind, seed: u64) -> Box<dyn Policy> {
    kind.baseline()
        .unwrap_or_else(|| Box::new(greedy_policy(random_table(seed), DiscretizationScheme::default())))
}

/// Steps one episode, checking capacity and conservation after every
/// decision and that every task is accounted for at the end.
pub fn check_episode(tasks: &[Task], policy: &mut dyn Policy, fleet: &SimConfig) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut episode = Episode::new(tasks, fleet).map_err(|e| e.to_string())?;
    episode.cluster().check_invariants(tasks)?;
    while !episode.is_done() {
        let decision: Decision = policy.decide(episode.cluster(), &mut rng);
        episode.step(decision, |_| 0.0);
        episode.cluster().check_invariants(tasks)?;
    }
    let truncated = episode.is_truncated();
    let log = episode.finish(0);
    if !truncated && log.tasks.len() != tasks.len() {
        return Err(format!("{} of {} tasks completed without truncation", log.tasks.len(), tasks.len()));
    }
    let mut ids: Vec<u64> = log.tasks.iter().map(|t| t.task_id).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() != log.tasks.len() {
        return Err("a task completed twice".into());
    }
    for t in &log.tasks {
        let task = tasks.iter().find(|w| w.id == t.task_id).ok_or("unknown task completed")?;
        if t.start < task.arrival_time || t.finish != t.start + task.duration {
            return Err(format!("task {} has inconsistent times", t.task_id));
        }
    }
    Ok(())
}

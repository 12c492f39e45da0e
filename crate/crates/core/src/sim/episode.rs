use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{init_cluster, Action, ClusterState, Decision, Observation, Outcome, SimConfig, Task};
use crate::error::Result;
use crate::rng::{self, Stream};

/// A scheduling policy consulted at every decision point.
pub trait Policy {
    fn name(&self) -> &str;

    fn decide(&mut self, cluster: &ClusterState, rng: &mut dyn RngCore) -> Decision;
}

/// Adapts a plain `Observation -> Action` function into a [`Policy`].
pub struct ObservationPolicy<F> {
    name: String,
    f: F,
}

impl<F: FnMut(&Observation) -> Action> ObservationPolicy<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        ObservationPolicy { name: name.into(), f }
    }
}

impl<F: FnMut(&Observation) -> Action> Policy for ObservationPolicy<F> {
    fn name(&self) -> &str {
        &self.name
    }

    fn decide(&mut self, cluster: &ClusterState, _rng: &mut dyn RngCore) -> Decision {
        Decision::Action((self.f)(&cluster.observe()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub tick: u64,
    pub observation: Observation,
    pub decision: Decision,
    pub outcome: Outcome,
    pub observation_after: Observation,
    pub reward: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task_id: u64,
    pub arrival: u64,
    pub start: u64,
    pub finish: u64,
}

/// Allocated resources held during one tick, sampled just before the clock
/// advances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TickSample {
    pub cpu_allocated: f64,
    pub mem_allocated: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub decisions: Vec<DecisionRecord>,
    pub tasks: Vec<TaskRecord>,
    pub ticks: Vec<TickSample>,
    pub tasks_total: usize,
    pub final_clock: u64,
    pub truncated: bool,
    pub seed: u64,
}

impl EpisodeLog {
    pub fn total_reward(&self) -> f64 {
        self.decisions.iter().map(|d| d.reward).sum()
    }
}

/// An episode in progress, driven one decision at a time.
///
/// After construction and after every [`Episode::step`] the episode sits at a
/// decision point (non-empty queue) or is done. Ticks with an empty queue are
/// skipped without consulting the policy.
pub struct Episode<'w> {
    workload: &'w [Task],
    max_attempts: usize,
    horizon: u64,
    cluster: ClusterState,
    attempts: usize,
    done: bool,
    truncated: bool,
    decisions: Vec<DecisionRecord>,
    ticks: Vec<TickSample>,
}

impl<'w> Episode<'w> {
    /// `workload` must be sorted by `(arrival_time, id)`.
    pub fn new(workload: &'w [Task], config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let mut cluster = init_cluster(config.machines, config.cpu_capacity, config.mem_capacity)?;
        cluster.enqueue_arrivals(workload);
        let mut episode = Episode {
            workload,
            max_attempts: config.max_attempts_per_tick,
            horizon: config.horizon_for(workload),
            cluster,
            attempts: 0,
            done: false,
            truncated: false,
            decisions: Vec::new(),
            ticks: Vec::new(),
        };
        episode.settle();
        Ok(episode)
    }

    pub fn cluster(&self) -> &ClusterState {
        &self.cluster
    }

    pub fn workload(&self) -> &'w [Task] {
        self.workload
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn decision_count(&self) -> usize {
        self.decisions.len()
    }

    /// Applies one decision, advances time if the tick's placement loop is
    /// over, and returns the outcome, the observation that follows it, and
    /// the reward earned.
    pub fn step<R>(&mut self, decision: Decision, reward: R) -> (Outcome, Observation, f64)
    where
        R: Fn(&Observation) -> f64,
    {
        assert!(!self.done, "step called on a finished episode");
        let tick = self.cluster.clock;
        let observation = self.cluster.observe();
        let outcome = self.cluster.apply(decision);
        self.attempts += 1;

        let keep_placing = matches!(outcome, Outcome::PlacedOn { .. })
            && !self.cluster.queue.is_empty()
            && self.attempts < self.max_attempts;
        if !keep_placing {
            self.tick();
        }
        self.settle();

        // Reward accrues per elapsed tick: placements within a tick take no
        // time and earn 0; the decision that closes the tick earns the reward
        // of the state the tick ends in.
        let observation_after = self.cluster.observe();
        let r = if keep_placing { 0.0 } else { reward(&observation_after) };
        self.decisions.push(DecisionRecord {
            tick,
            observation,
            decision,
            outcome,
            observation_after,
            reward: r,
        });
        (outcome, observation_after, r)
    }

    fn tick(&mut self) {
        self.ticks.push(TickSample {
            cpu_allocated: self.cluster.total_cpu_allocated(),
            mem_allocated: self.cluster.total_mem_allocated(),
        });
        self.cluster.advance_tick(self.workload);
        self.attempts = 0;
    }

    fn settle(&mut self) {
        loop {
            if self.cluster.completed.len() == self.workload.len() {
                self.done = true;
                return;
            }
            if self.cluster.clock >= self.horizon {
                self.done = true;
                self.truncated = true;
                return;
            }
            if !self.cluster.queue.is_empty() {
                return;
            }
            self.tick();
        }
    }

    pub fn finish(self, seed: u64) -> EpisodeLog {
        let tasks = self
            .cluster
            .completed
            .iter()
            .map(|c| TaskRecord {
                task_id: c.task_id,
                arrival: c.arrival,
                start: c.start,
                finish: c.finish,
            })
            .collect();
        EpisodeLog {
            decisions: self.decisions,
            tasks,
            ticks: self.ticks,
            tasks_total: self.workload.len(),
            final_clock: self.cluster.clock,
            truncated: self.truncated,
            seed,
        }
    }
}

/// Runs `policy` over `workload` from an empty cluster until every task has
/// completed or the horizon is reached.
pub fn run_episode<R>(
    workload: &[Task],
    policy: &mut dyn Policy,
    config: &SimConfig,
    seed: u64,
    reward: R,
) -> Result<EpisodeLog>
where
    R: Fn(&Observation) -> f64,
{
    let mut rng = rng::stream(seed, Stream::Evaluation);
    let mut episode = Episode::new(workload, config)?;
    while !episode.is_done() {
        let decision = policy.decide(episode.cluster(), &mut rng);
        episode.step(decision, &reward);
    }
    Ok(episode.finish(seed))
}

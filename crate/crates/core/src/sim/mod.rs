//! Discrete-time cluster simulator.
//!
//! Time advances in integer ticks. Each tick the active policy may place
//! several queued tasks (up to [`SimConfig::max_attempts_per_tick`]); the tick
//! then advances, newly arrived tasks join the back of the queue in id order,
//! and tasks whose finish tick has been reached release their resources.

mod episode;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use episode::{
    run_episode, DecisionRecord, Episode, EpisodeLog, ObservationPolicy, Policy, TaskRecord,
    TickSample,
};

/// Slack used when comparing accumulated resource amounts against capacity.
pub const CAPACITY_EPS: f64 = 1e-9;

/// Highest legal task priority. Larger numbers are more urgent.
pub const MAX_PRIORITY: u8 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: u64,
    pub arrival_time: u64,
    pub duration: u64,
    pub cpu_req: f64,
    pub mem_req: f64,
    pub priority: u8,
}

impl Task {
    /// Checks the per-task invariants, returning a description of the first
    /// violation.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.duration < 1 {
            return Err(format!("task {}: duration must be at least 1", self.id));
        }
        if !(self.cpu_req.is_finite() && self.cpu_req > 0.0) {
            return Err(format!("task {}: cpu request must be positive", self.id));
        }
        if !(self.mem_req.is_finite() && self.mem_req > 0.0) {
            return Err(format!("task {}: memory request must be positive", self.id));
        }
        if self.priority > MAX_PRIORITY {
            return Err(format!(
                "task {}: priority {} outside [0, {MAX_PRIORITY}]",
                self.id, self.priority
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunningTask {
    pub task: Task,
    pub start: u64,
    pub finish: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Machine {
    pub id: usize,
    pub cpu_capacity: f64,
    pub mem_capacity: f64,
    pub cpu_allocated: f64,
    pub mem_allocated: f64,
    pub running: Vec<RunningTask>,
}

impl Machine {
    fn new(id: usize, cpu_capacity: f64, mem_capacity: f64) -> Self {
        Machine {
            id,
            cpu_capacity,
            mem_capacity,
            cpu_allocated: 0.0,
            mem_allocated: 0.0,
            running: Vec::new(),
        }
    }

    pub fn free_cpu(&self) -> f64 {
        self.cpu_capacity - self.cpu_allocated
    }

    pub fn free_mem(&self) -> f64 {
        self.mem_capacity - self.mem_allocated
    }

    pub fn fits(&self, task: &Task) -> bool {
        self.cpu_allocated + task.cpu_req <= self.cpu_capacity + CAPACITY_EPS
            && self.mem_allocated + task.mem_req <= self.mem_capacity + CAPACITY_EPS
    }

    fn start(&mut self, task: Task, clock: u64) {
        let finish = clock + task.duration;
        self.running.push(RunningTask {
            task,
            start: clock,
            finish,
        });
        self.recompute_allocations();
    }

    fn release_finished(&mut self, clock: u64) -> Vec<RunningTask> {
        let (done, still): (Vec<_>, Vec<_>) =
            self.running.drain(..).partition(|r| r.finish <= clock);
        self.running = still;
        self.recompute_allocations();
        done
    }

    // Summing from the running set keeps allocations exactly equal to the
    // demands of running tasks, with no drift from repeated add/subtract.
    fn recompute_allocations(&mut self) {
        self.cpu_allocated = self.running.iter().map(|r| r.task.cpu_req).sum();
        self.mem_allocated = self.running.iter().map(|r| r.task.mem_req).sum();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completion {
    pub task_id: u64,
    pub arrival: u64,
    pub start: u64,
    pub finish: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterState {
    pub machines: Vec<Machine>,
    pub queue: VecDeque<Task>,
    pub clock: u64,
    pub completed: Vec<Completion>,
}

/// Utilization snapshot fed to policies and to the learning agent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub cpu_util: f64,
    pub mem_util: f64,
    pub queue_len: usize,
}

/// The four scheduling actions available to the learning agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    /// Place the head-of-queue task on the feasible machine with the least
    /// CPU left over afterwards.
    PackBestFit = 0,
    /// Place the head-of-queue task on the feasible machine with the most free
    /// CPU.
    SpreadLeastLoaded = 1,
    /// Place nothing.
    Defer = 2,
    /// Move the most urgent queued task to the head, then best-fit it.
    PromoteUrgent = 3,
}

impl Action {
    pub const COUNT: usize = 4;
    pub const ALL: [Action; Action::COUNT] = [
        Action::PackBestFit,
        Action::SpreadLeastLoaded,
        Action::Defer,
        Action::PromoteUrgent,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Action> {
        Action::ALL.get(index).copied()
    }
}

/// A concrete placement instruction, as emitted by the baseline policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Directive {
    Place { queue_index: usize, machine: usize },
    Defer,
}

/// What a policy hands to the simulator at a decision point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Action(Action),
    Directive(Directive),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    PlacedOn { task_id: u64, machine: usize },
    Deferred,
    Infeasible,
}

/// Fleet and episode-loop configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub machines: usize,
    pub cpu_capacity: f64,
    pub mem_capacity: f64,
    #[serde(default = "default_attempts")]
    pub max_attempts_per_tick: usize,
    /// Hard stop for an episode. `None` uses
    /// `10 * last_arrival + sum(durations)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
}

fn default_attempts() -> usize {
    8
}

impl SimConfig {
    pub fn new(machines: usize, cpu_capacity: f64, mem_capacity: f64) -> Self {
        SimConfig {
            machines,
            cpu_capacity,
            mem_capacity,
            max_attempts_per_tick: default_attempts(),
            horizon: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        init_cluster(self.machines, self.cpu_capacity, self.mem_capacity)?;
        if self.max_attempts_per_tick == 0 {
            return Err(Error::Config(
                "max_attempts_per_tick must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn total_cpu(&self) -> f64 {
        self.machines as f64 * self.cpu_capacity
    }

    pub fn total_mem(&self) -> f64 {
        self.machines as f64 * self.mem_capacity
    }

    pub fn horizon_for(&self, workload: &[Task]) -> u64 {
        self.horizon.unwrap_or_else(|| default_horizon(workload))
    }
}

pub fn default_horizon(workload: &[Task]) -> u64 {
    let last_arrival = workload.iter().map(|t| t.arrival_time).max().unwrap_or(0);
    let total: u64 = workload.iter().map(|t| t.duration).sum();
    10 * last_arrival + total
}

/// Builds a homogeneous fleet with an empty queue at tick 0.
pub fn init_cluster(machine_count: usize, cpu_capacity: f64, mem_capacity: f64) -> Result<ClusterState> {
    if machine_count == 0 {
        return Err(Error::Config("cluster needs at least one machine".into()));
    }
    if !(cpu_capacity.is_finite() && cpu_capacity > 0.0) {
        return Err(Error::Config(format!("cpu capacity must be positive, got {cpu_capacity}")));
    }
    if !(mem_capacity.is_finite() && mem_capacity > 0.0) {
        return Err(Error::Config(format!("memory capacity must be positive, got {mem_capacity}")));
    }
    Ok(ClusterState {
        machines: (0..machine_count)
            .map(|id| Machine::new(id, cpu_capacity, mem_capacity))
            .collect(),
        queue: VecDeque::new(),
        clock: 0,
        completed: Vec::new(),
    })
}

pub fn observe(cluster: &ClusterState) -> Observation {
    cluster.observe()
}

pub fn apply_action(cluster: &mut ClusterState, action: Action) -> Outcome {
    cluster.apply_action(action)
}

pub fn advance_tick(cluster: &mut ClusterState, workload: &[Task]) {
    cluster.advance_tick(workload)
}

impl ClusterState {
    pub fn observe(&self) -> Observation {
        let (cpu_cap, mem_cap, cpu_alloc, mem_alloc) = self.machines.iter().fold(
            (0.0, 0.0, 0.0, 0.0),
            |(cc, mc, ca, ma), m| {
                (
                    cc + m.cpu_capacity,
                    mc + m.mem_capacity,
                    ca + m.cpu_allocated,
                    ma + m.mem_allocated,
                )
            },
        );
        Observation {
            cpu_util: (cpu_alloc / cpu_cap).clamp(0.0, 1.0),
            mem_util: (mem_alloc / mem_cap).clamp(0.0, 1.0),
            queue_len: self.queue.len(),
        }
    }

    pub fn total_cpu_allocated(&self) -> f64 {
        self.machines.iter().map(|m| m.cpu_allocated).sum()
    }

    pub fn total_mem_allocated(&self) -> f64 {
        self.machines.iter().map(|m| m.mem_allocated).sum()
    }

    pub fn running_count(&self) -> usize {
        self.machines.iter().map(|m| m.running.len()).sum()
    }

    /// Feasible machine minimizing leftover CPU, then leftover memory, then id.
    pub fn best_fit_machine(&self, task: &Task) -> Option<usize> {
        self.machines
            .iter()
            .filter(|m| m.fits(task))
            .min_by(|a, b| {
                (a.free_cpu() - task.cpu_req)
                    .total_cmp(&(b.free_cpu() - task.cpu_req))
                    .then((a.free_mem() - task.mem_req).total_cmp(&(b.free_mem() - task.mem_req)))
                    .then(a.id.cmp(&b.id))
            })
            .map(|m| m.id)
    }

    /// Feasible machine with the most free CPU; ties go to the lowest id.
    pub fn least_loaded_machine(&self, task: &Task) -> Option<usize> {
        self.machines
            .iter()
            .filter(|m| m.fits(task))
            .min_by(|a, b| b.free_cpu().total_cmp(&a.free_cpu()).then(a.id.cmp(&b.id)))
            .map(|m| m.id)
    }

    /// Queue position of the most urgent task; ties keep queue order.
    pub fn most_urgent_index(&self) -> Option<usize> {
        self.queue
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.priority.cmp(&b.priority).then(ib.cmp(ia)))
            .map(|(i, _)| i)
    }

    pub fn apply_action(&mut self, action: Action) -> Outcome {
        let Some(head) = self.queue.front() else {
            return Outcome::Deferred;
        };
        let (index, machine) = match action {
            Action::Defer => return Outcome::Deferred,
            Action::PackBestFit => (0, self.best_fit_machine(head)),
            Action::SpreadLeastLoaded => (0, self.least_loaded_machine(head)),
            Action::PromoteUrgent => {
                let index = self.most_urgent_index().expect("queue is non-empty");
                (index, self.best_fit_machine(&self.queue[index]))
            }
        };
        match machine {
            Some(machine) => self.place(index, machine),
            None => Outcome::Infeasible,
        }
    }

    pub fn apply_directive(&mut self, directive: Directive) -> Outcome {
        match directive {
            Directive::Defer => Outcome::Deferred,
            Directive::Place { queue_index, machine } => {
                let fits = match (self.queue.get(queue_index), self.machines.get(machine)) {
                    (Some(task), Some(m)) => m.fits(task),
                    _ => false,
                };
                if fits {
                    self.place(queue_index, machine)
                } else {
                    Outcome::Infeasible
                }
            }
        }
    }

    pub fn apply(&mut self, decision: Decision) -> Outcome {
        match decision {
            Decision::Action(a) => self.apply_action(a),
            Decision::Directive(d) => self.apply_directive(d),
        }
    }

    fn place(&mut self, queue_index: usize, machine: usize) -> Outcome {
        let task = self.queue.remove(queue_index).expect("queue index in range");
        let task_id = task.id;
        let clock = self.clock;
        self.machines[machine].start(task, clock);
        Outcome::PlacedOn { task_id, machine }
    }

    /// Appends the tasks arriving exactly at the current clock, in id order.
    pub fn enqueue_arrivals(&mut self, workload: &[Task]) {
        let lo = workload.partition_point(|t| t.arrival_time < self.clock);
        let hi = workload.partition_point(|t| t.arrival_time <= self.clock);
        let mut arriving: Vec<&Task> = workload[lo..hi].iter().collect();
        arriving.sort_by_key(|t| t.id);
        self.queue.extend(arriving.into_iter().cloned());
    }

    pub fn advance_tick(&mut self, workload: &[Task]) {
        self.clock += 1;
        let clock = self.clock;
        let mut finished: Vec<RunningTask> = self
            .machines
            .iter_mut()
            .flat_map(|m| m.release_finished(clock))
            .collect();
        finished.sort_by_key(|r| r.task.id);
        self.completed.extend(finished.into_iter().map(|r| Completion {
            task_id: r.task.id,
            arrival: r.task.arrival_time,
            start: r.start,
            finish: r.finish,
        }));
        self.enqueue_arrivals(workload);
    }

    /// Number of workload tasks whose arrival time has been reached.
    pub fn arrived_count(&self, workload: &[Task]) -> usize {
        workload.partition_point(|t| t.arrival_time <= self.clock)
    }

    /// Checks capacity safety, allocation bookkeeping, and task conservation.
    pub fn check_invariants(&self, workload: &[Task]) -> std::result::Result<(), String> {
        for m in &self.machines {
            if m.cpu_allocated > m.cpu_capacity + CAPACITY_EPS || m.cpu_allocated < -CAPACITY_EPS {
                return Err(format!("machine {} cpu allocation {} out of range", m.id, m.cpu_allocated));
            }
            if m.mem_allocated > m.mem_capacity + CAPACITY_EPS || m.mem_allocated < -CAPACITY_EPS {
                return Err(format!("machine {} mem allocation {} out of range", m.id, m.mem_allocated));
            }
            let cpu: f64 = m.running.iter().map(|r| r.task.cpu_req).sum();
            let mem: f64 = m.running.iter().map(|r| r.task.mem_req).sum();
            if (cpu - m.cpu_allocated).abs() > CAPACITY_EPS || (mem - m.mem_allocated).abs() > CAPACITY_EPS {
                return Err(format!("machine {} allocations disagree with running set", m.id));
            }
            for r in &m.running {
                if r.finish != r.start + r.task.duration {
                    return Err(format!("task {} finish != start + duration", r.task.id));
                }
            }
        }
        let arrived = self.arrived_count(workload);
        let accounted = self.queue.len() + self.running_count() + self.completed.len();
        if arrived != accounted {
            return Err(format!(
                "conservation broken at tick {}: arrived {arrived}, queued+running+completed {accounted}",
                self.clock
            ));
        }
        Ok(())
    }
}

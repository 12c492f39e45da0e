//! Classical scheduling policies: round-robin, non-preemptive priority, and a
//! best-fit stand-in for dynamic resource allocation (DRA).
//!
//! All three emit [`Directive`]s and run through the same episode loop as the
//! learned policy, so their metrics are comparable tick for tick.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::sim::{ClusterState, Decision, Directive, Policy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PolicyKind {
    #[serde(rename = "round-robin")]
    RoundRobin,
    #[serde(rename = "priority")]
    PriorityScheduling,
    #[serde(rename = "dra")]
    Dra,
    #[serde(rename = "q-greedy")]
    QGreedy,
}

impl PolicyKind {
    /// Canonical report order.
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::RoundRobin,
        PolicyKind::PriorityScheduling,
        PolicyKind::Dra,
        PolicyKind::QGreedy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::RoundRobin => "round-robin",
            PolicyKind::PriorityScheduling => "priority",
            PolicyKind::Dra => "dra",
            PolicyKind::QGreedy => "q-greedy",
        }
    }

    /// A fresh baseline policy, or `None` for [`PolicyKind::QGreedy`], which
    /// needs a trained table.
    pub fn baseline(self) -> Option<Box<dyn Policy>> {
        match self {
            PolicyKind::RoundRobin => Some(Box::new(RoundRobin::default())),
            PolicyKind::PriorityScheduling => Some(Box::new(PriorityScheduling)),
            PolicyKind::Dra => Some(Box::new(Dra)),
            PolicyKind::QGreedy => None,
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown policy `{s}` (expected round-robin | priority | dra | q-greedy)"
                ))
            })
    }
}

/// Strict FIFO; the head task goes to the machine under a persistent cursor,
/// skipping machines it does not fit. A full cycle without a fit defers and
/// leaves the cursor where it was.
pub fn round_robin_decide(cluster: &ClusterState, cursor: &mut usize) -> Directive {
    let Some(head) = cluster.queue.front() else {
        return Directive::Defer;
    };
    let n = cluster.machines.len();
    for k in 0..n {
        let m = (*cursor + k) % n;
        if cluster.machines[m].fits(head) {
            *cursor = (m + 1) % n;
            return Directive::Place { queue_index: 0, machine: m };
        }
    }
    Directive::Defer
}

/// Highest priority first (ties: earliest arrival, then lowest id), placed on
/// the lowest-id machine that fits. Non-preemptive.
pub fn priority_decide(cluster: &ClusterState) -> Directive {
    let Some((index, task)) = cluster.queue.iter().enumerate().min_by(|(_, a), (_, b)| {
        b.priority
            .cmp(&a.priority)
            .then(a.arrival_time.cmp(&b.arrival_time))
            .then(a.id.cmp(&b.id))
    }) else {
        return Directive::Defer;
    };
    match cluster.machines.iter().find(|m| m.fits(task)) {
        Some(m) => Directive::Place { queue_index: index, machine: m.id },
        None => Directive::Defer,
    }
}

/// Best fit for the head task: least leftover CPU, then least leftover
/// memory, then lowest machine id.
pub fn dra_decide(cluster: &ClusterState) -> Directive {
    let Some(head) = cluster.queue.front() else {
        return Directive::Defer;
    };
    match cluster.best_fit_machine(head) {
        Some(machine) => Directive::Place { queue_index: 0, machine },
        None => Directive::Defer,
    }
}

#[derive(Debug, Clone, Default)]
pub struct RoundRobin {
    pub cursor: usize,
}

impl Policy for RoundRobin {
    fn name(&self) -> &str {
        "round-robin"
    }

    fn decide(&mut self, cluster: &ClusterState, _rng: &mut dyn RngCore) -> Decision {
        Decision::Directive(round_robin_decide(cluster, &mut self.cursor))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PriorityScheduling;

impl Policy for PriorityScheduling {
    fn name(&self) -> &str {
        "priority"
    }

    fn decide(&mut self, cluster: &ClusterState, _rng: &mut dyn RngCore) -> Decision {
        Decision::Directive(priority_decide(cluster))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Dra;

impl Policy for Dra {
    fn name(&self) -> &str {
        "dra"
    }

    fn decide(&mut self, cluster: &ClusterState, _rng: &mut dyn RngCore) -> Decision {
        Decision::Directive(dra_decide(cluster))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{init_cluster, run_episode, Outcome, SimConfig, Task};

    fn task(id: u64, arrival: u64, duration: u64, cpu: f64, priority: u8) -> Task {
        Task { id, arrival_time: arrival, duration, cpu_req: cpu, mem_req: 1.0, priority }
    }

    fn placements(log: &crate::sim::EpisodeLog) -> Vec<usize> {
        log.decisions
            .iter()
            .filter_map(|d| match d.outcome {
                Outcome::PlacedOn { machine, .. } => Some(machine),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn round_robin_three_tasks_two_machines() {
        let workload = vec![task(0, 0, 5, 1.0, 0), task(1, 1, 5, 1.0, 0), task(2, 2, 5, 1.0, 0)];
        let log = run_episode(&workload, &mut RoundRobin::default(), &SimConfig::new(2, 4.0, 8.0), 0, |_| 0.0).unwrap();
        assert_eq!(placements(&log), vec![0, 1, 0]);
    }

    #[test]
    fn round_robin_single_machine_and_full_miss() {
        let workload: Vec<Task> = (0..4).map(|i| task(i, i, 2, 1.0, 0)).collect();
        let log = run_episode(&workload, &mut RoundRobin::default(), &SimConfig::new(1, 4.0, 8.0), 0, |_| 0.0).unwrap();
        assert_eq!(placements(&log), vec![0; 4]);

        let mut c = init_cluster(3, 4.0, 8.0).unwrap();
        c.queue.push_back(task(0, 0, 5, 5.0, 0));
        let mut cursor = 2;
        assert_eq!(round_robin_decide(&c, &mut cursor), Directive::Defer);
        assert_eq!(cursor, 2);
    }

    #[test]
    fn round_robin_skips_full_machines() {
        let mut c = init_cluster(3, 4.0, 8.0).unwrap();
        c.queue.push_back(task(0, 0, 5, 4.0, 0));
        c.apply_directive(Directive::Place { queue_index: 0, machine: 1 });
        c.queue.push_back(task(1, 0, 5, 2.0, 0));
        let mut cursor = 1;
        assert_eq!(round_robin_decide(&c, &mut cursor), Directive::Place { queue_index: 0, machine: 2 });
        assert_eq!(cursor, 0);
    }

    #[test]
    fn priority_examples() {
        let mut c = init_cluster(2, 4.0, 8.0).unwrap();
        for (id, p) in [(0, 2), (1, 4), (2, 1)] {
            c.queue.push_back(task(id, 0, 5, 1.0, p));
        }
        assert_eq!(priority_decide(&c), Directive::Place { queue_index: 1, machine: 0 });

        let mut c = init_cluster(2, 4.0, 8.0).unwrap();
        for id in [3, 4, 5] {
            c.queue.push_back(task(id, 0, 5, 1.0, 2));
        }
        assert_eq!(priority_decide(&c), Directive::Place { queue_index: 0, machine: 0 });

        let mut c = init_cluster(2, 4.0, 8.0).unwrap();
        c.queue.push_back(task(0, 0, 5, 1.0, 0));
        c.queue.push_back(task(1, 0, 5, 9.0, 3));
        assert_eq!(priority_decide(&c), Directive::Defer);
    }

    #[test]
    fn dra_examples() {
        let mut c = init_cluster(3, 8.0, 100.0).unwrap();
        c.queue.push_back(task(90, 0, 5, 4.0, 0));
        c.queue.push_back(task(91, 0, 5, 6.0, 0));
        c.apply_directive(Directive::Place { queue_index: 0, machine: 0 });
        c.apply_directive(Directive::Place { queue_index: 0, machine: 1 });
        c.queue.push_back(task(0, 0, 5, 2.0, 0));
        assert_eq!(dra_decide(&c), Directive::Place { queue_index: 0, machine: 1 });

        let mut c = init_cluster(3, 4.0, 8.0).unwrap();
        c.queue.push_back(task(0, 0, 5, 1.0, 0));
        assert_eq!(dra_decide(&c), Directive::Place { queue_index: 0, machine: 0 });

        c.queue[0].cpu_req = 5.0;
        assert_eq!(dra_decide(&c), Directive::Defer);
    }

    #[test]
    fn policy_names_parse() {
        for k in PolicyKind::ALL {
            assert_eq!(k.as_str().parse::<PolicyKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{k}\""));
        }
        assert!(matches!("fifo".parse::<PolicyKind>(), Err(Error::Config(_))));
    }
}

use serde::{Deserialize, Serialize};

use crate::sim::{EpisodeLog, SimConfig};

/// Aggregate metrics of one episode.
///
/// `mean_completion_time` is the mean turnaround (`finish - arrival`) over
/// completed tasks; `None` marks an episode in which nothing completed.
/// `resource_utilization` is the time average, over every elapsed tick, of
/// the mean of the CPU and memory utilization fractions, as a percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mean_completion_time: Option<f64>,
    pub makespan: u64,
    pub resource_utilization: f64,
    pub tasks_completed: usize,
    pub tasks_total: usize,
    pub truncated: bool,
}

pub fn compute_metrics(log: &EpisodeLog, fleet: &SimConfig) -> Metrics {
    let completed = log.tasks.len();
    let mean_completion_time = (completed > 0).then(|| {
        let total: u64 = log.tasks.iter().map(|t| t.finish - t.arrival).sum();
        total as f64 / completed as f64
    });
    let makespan = log.tasks.iter().map(|t| t.finish).max().unwrap_or(0);

    let (total_cpu, total_mem) = (fleet.total_cpu(), fleet.total_mem());
    let resource_utilization = if log.ticks.is_empty() {
        0.0
    } else {
        let sum: f64 = log
            .ticks
            .iter()
            .map(|s| {
                let cpu = (s.cpu_allocated / total_cpu).clamp(0.0, 1.0);
                let mem = (s.mem_allocated / total_mem).clamp(0.0, 1.0);
                (cpu + mem) / 2.0
            })
            .sum();
        (100.0 * sum / log.ticks.len() as f64).clamp(0.0, 100.0)
    };

    Metrics {
        mean_completion_time,
        makespan,
        resource_utilization,
        tasks_completed: completed,
        tasks_total: log.tasks_total,
        truncated: log.truncated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{TaskRecord, TickSample};

    fn log(tasks: Vec<TaskRecord>, ticks: Vec<TickSample>) -> EpisodeLog {
        EpisodeLog {
            decisions: vec![],
            tasks_total: tasks.len(),
            final_clock: ticks.len() as u64,
            tasks,
            ticks,
            truncated: false,
            seed: 0,
        }
    }

    #[test]
    fn mean_turnaround() {
        let l = log(
            vec![
                TaskRecord { task_id: 0, arrival: 0, start: 0, finish: 10 },
                TaskRecord { task_id: 1, arrival: 5, start: 6, finish: 10 },
            ],
            vec![],
        );
        let m = compute_metrics(&l, &SimConfig::new(1, 4.0, 8.0));
        assert_eq!(m.mean_completion_time, Some(7.5));
        assert_eq!(m.makespan, 10);
    }

    #[test]
    fn utilization_integrates_over_ticks() {
        let busy = TickSample { cpu_allocated: 2.0, mem_allocated: 0.0 };
        let idle = TickSample { cpu_allocated: 0.0, mem_allocated: 0.0 };
        let ticks: Vec<TickSample> = std::iter::repeat_n(busy, 10).chain(std::iter::repeat_n(idle, 10)).collect();
        let m = compute_metrics(&log(vec![], ticks), &SimConfig::new(1, 4.0, 8.0));
        assert_eq!(m.resource_utilization, 12.5);
    }

    #[test]
    fn empty_log_has_no_data() {
        let m = compute_metrics(&log(vec![], vec![]), &SimConfig::new(1, 4.0, 8.0));
        assert_eq!(m.mean_completion_time, None);
        assert_eq!(m.resource_utilization, 0.0);
        assert_eq!(m.makespan, 0);
    }
}

// Plugging a hand-written rule into the simulator: place best-fit while the
// cluster is under half full, otherwise spread.

use qsched::harness::{compute_metrics, Metrics};
use qsched::sim::{run_episode, Action, ObservationPolicy, Observation, SimConfig};
use qsched::workload::Workload;

pub fn run_example() -> qsched::Result<Metrics> {
    let workload = Workload::bundled_sample();
    let fleet = SimConfig::new(8, 8.0, 16.0);
    let mut policy = ObservationPolicy::new("half-full", |o: &Observation| {
        if o.cpu_util < 0.5 { Action::PackBestFit } else { Action::SpreadLeastLoaded }
    });
    let log = run_episode(workload.tasks(), &mut policy, &fleet, 0, |o| -(o.cpu_util + o.mem_util))?;
    let metrics = compute_metrics(&log, &fleet);
    println!("{metrics:?}");
    Ok(metrics)
}

#[allow(dead_code)]
fn main() -> qsched::Result<()> {
    run_example().map(|_| ())
}

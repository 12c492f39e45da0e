// Seeded Poisson workload: same seed, same trace, byte for byte.

use qsched::workload::{generate_synthetic, SynthParams, Workload};

pub fn run_example() -> qsched::Result<Workload> {
    let params = SynthParams { task_count: 1_000, arrival_rate: 2.0, seed: 17, ..SynthParams::default() };
    let workload = generate_synthetic(&params)?;
    let again = generate_synthetic(&params)?;
    assert_eq!(workload.to_csv(), again.to_csv());

    let tasks = workload.tasks();
    let span = tasks.last().map_or(0, |t| t.arrival_time);
    let mut by_priority = [0usize; 5];
    for t in tasks {
        by_priority[t.priority as usize] += 1;
    }
    println!("{} tasks over {span} ticks ({:.2} per tick)", tasks.len(), tasks.len() as f64 / span.max(1) as f64);
    println!("per priority: {by_priority:?}");
    println!("sha256 {}", workload.checksum());
    Ok(workload)
}

#[allow(dead_code)]
fn main() -> qsched::Result<()> {
    run_example().map(|_| ())
}

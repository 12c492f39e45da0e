// Train the agent on the bundled benchmark and rank it against the three
// baselines on the same workload and fleet.

use qsched::harness::{compare, comparison_csv, Comparison, ExperimentConfig};

pub fn run_example() -> qsched::Result<Comparison> {
    let config = ExperimentConfig::benchmark();
    let comparison = compare(&config)?;
    print!("{}", comparison_csv(&comparison.table));
    Ok(comparison)
}

#[allow(dead_code)]
fn main() -> qsched::Result<()> {
    run_example().map(|_| ())
}

// Learning-rate sensitivity: one trained agent per alpha, evaluated greedily.

use qsched::harness::{sweep_alpha, sweep_csv, ExperimentConfig, SweepTable};

pub const ALPHAS: [f64; 5] = [0.0005, 0.0004, 0.0003, 0.0002, 0.0001];

pub fn run_example() -> qsched::Result<SweepTable> {
    let sweep = sweep_alpha(&ExperimentConfig::benchmark(), &ALPHAS)?;
    print!("{}", sweep_csv(&sweep));
    Ok(sweep)
}

#[allow(dead_code)]
fn main() -> qsched::Result<()> {
    run_example().map(|_| ())
}

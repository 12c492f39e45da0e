// Per-episode training reward on the benchmark, summarised as the mean of
// the first and last tenth of training.

use qsched::harness::{train_experiment, ExperimentConfig};
use qsched::qagent::CurvePoint;

fn mean(points: &[CurvePoint]) -> f64 {
    points.iter().map(|p| p.total_reward).sum::<f64>() / points.len() as f64
}

pub struct CurveSummary {
    pub curve: Vec<CurvePoint>,
    pub first_tenth: f64,
    pub last_tenth: f64,
}

pub fn run_example() -> qsched::Result<CurveSummary> {
    let (_, training) = train_experiment(&ExperimentConfig::benchmark())?;
    let curve = training.curve;
    let tenth = (curve.len() / 10).max(1);
    let first_tenth = mean(&curve[..tenth]);
    let last_tenth = mean(&curve[curve.len() - tenth..]);
    for p in curve.iter().step_by(20) {
        println!("episode {:>3}  epsilon {:.3}  reward {:>9.2}", p.episode, p.epsilon, p.total_reward);
    }
    println!("first tenth {first_tenth:.2}, last tenth {last_tenth:.2}");
    Ok(CurveSummary { curve, first_tenth, last_tenth })
}

#[allow(dead_code)]
fn main() -> qsched::Result<()> {
    run_example().map(|_| ())
}

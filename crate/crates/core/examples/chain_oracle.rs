// Q-learning on a three-state chain, checked against value iteration.
//
// States 0, 1, 2; action 0 moves left (reward -1), action 1 moves right
// (reward -0.5, or 0 when stepping off state 2, which ends the episode).

use qsched::qagent::{train_env, EnvStep, Environment, Hyperparams, QTable, StateId};

pub const STATES: usize = 3;
pub const GAMMA: f64 = 0.9;

/// Successor and reward; `None` successor is terminal.
pub fn transition(s: usize, a: usize) -> (Option<usize>, f64) {
    match (s, a) {
        (0, 0) => (Some(0), -1.0),
        (s, 0) => (Some(s - 1), -1.0),
        (2, _) => (None, 0.0),
        (s, _) => (Some(s + 1), -0.5),
    }
}

#[derive(Default)]
pub struct Chain {
    at: usize,
}

impl Environment for Chain {
    fn state_count(&self) -> usize {
        STATES
    }

    fn action_count(&self) -> usize {
        2
    }

    fn reset(&mut self) -> Option<StateId> {
        self.at = 0;
        Some(StateId(0))
    }

    fn step(&mut self, action: usize) -> EnvStep {
        let (next, reward) = transition(self.at, action);
        self.at = next.unwrap_or(self.at);
        EnvStep { reward, next: StateId(self.at), terminal: next.is_none() }
    }
}

/// Optimal action values by value iteration, to `tol`.
pub fn value_iteration(gamma: f64, tol: f64) -> [[f64; 2]; STATES] {
    let mut q = [[0.0f64; 2]; STATES];
    loop {
        let v: Vec<f64> = q.iter().map(|r| r[0].max(r[1])).collect();
        let mut delta: f64 = 0.0;
        for s in 0..STATES {
            for a in 0..2 {
                let (next, r) = transition(s, a);
                let new = r + next.map_or(0.0, |n| gamma * v[n]);
                delta = delta.max((new - q[s][a]).abs());
                q[s][a] = new;
            }
        }
        if delta < tol {
            return q;
        }
    }
}

pub fn chain_hyperparams() -> Hyperparams {
    Hyperparams {
        alpha: 0.5,
        gamma: GAMMA,
        eps_start: 1.0,
        eps_decay: 1.0,
        eps_min: 1.0,
        batch_size: 32,
        replay_capacity: 1_000,
        episodes: 60,
        seed: 3,
    }
}

pub fn max_error(table: &QTable, oracle: &[[f64; 2]; STATES]) -> f64 {
    (0..STATES)
        .flat_map(|s| (0..2).map(move |a| (s, a)))
        .map(|(s, a)| (table.get(StateId(s), a) - oracle[s][a]).abs())
        .fold(0.0, f64::max)
}

pub struct ChainRun {
    pub oracle: [[f64; 2]; STATES],
    pub table: QTable,
    pub updates: u64,
    pub max_error: f64,
}

pub fn run_example() -> qsched::Result<ChainRun> {
    let oracle = value_iteration(GAMMA, 1e-12);
    let training = train_env(&mut Chain::default(), &chain_hyperparams())?;
    let max_error = max_error(&training.table, &oracle);
    for s in 0..STATES {
        println!(
            "s{s}: left {:>8.4} (oracle {:>8.4})  right {:>8.4} (oracle {:>8.4})",
            training.table.get(StateId(s), 0),
            oracle[s][0],
            training.table.get(StateId(s), 1),
            oracle[s][1]
        );
    }
    println!("{} updates, max |Q - Q*| = {max_error:.2e}", training.updates);
    Ok(ChainRun { oracle, table: training.table, updates: training.updates, max_error })
}

#[allow(dead_code)]
fn main() -> qsched::Result<()> {
    run_example().map(|_| ())
}

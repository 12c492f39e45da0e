//! Tabular Q-learning scheduler.
//!
//! The agent observes `(cpu_util, mem_util, queue_len)`, discretizes it onto a
//! grid, and learns one action value per `(state, action)` pair with
//! epsilon-greedy exploration and uniform experience replay. A trained table
//! is deployed greedily through [`GreedyPolicy`].

mod discretize;
mod replay;
mod table;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Stream};
use crate::sim::{Action, ClusterState, Decision, Episode, Policy, SimConfig, Task};

pub use discretize::{discretize, reward, DiscretizationScheme, StateId};
pub use replay::{ReplayBuffer, Transition};
pub use table::{argmax, q_update, select_action, QTable, QTABLE_HEADER};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Hyperparams {
    pub alpha: f64,
    pub gamma: f64,
    pub eps_start: f64,
    /// Multiplicative epsilon decay applied once per episode.
    pub eps_decay: f64,
    pub eps_min: f64,
    pub batch_size: usize,
    pub replay_capacity: usize,
    pub episodes: usize,
    /// Set from the experiment seed rather than read from config files.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            alpha: 0.1,
            gamma: 0.95,
            eps_start: 1.0,
            eps_decay: 0.95,
            eps_min: 0.05,
            batch_size: 32,
            replay_capacity: 10_000,
            episodes: 200,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha must be in (0, 1], got {}", self.alpha));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad(format!("gamma must be in [0, 1), got {}", self.gamma));
        }
        for (name, v) in [("eps_start", self.eps_start), ("eps_min", self.eps_min)] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must be in [0, 1], got {v}"));
            }
        }
        if !(self.eps_decay > 0.0 && self.eps_decay <= 1.0) {
            return bad(format!("eps_decay must be in (0, 1], got {}", self.eps_decay));
        }
        if self.batch_size == 0 || self.replay_capacity == 0 {
            return bad("batch_size and replay_capacity must be at least 1".into());
        }
        if self.batch_size > self.replay_capacity {
            return bad("batch_size cannot exceed replay_capacity".into());
        }
        Ok(())
    }
}

/// `max(eps_min, eps_start * eps_decay^episode)`.
pub fn epsilon_schedule(episode: usize, hp: &Hyperparams) -> f64 {
    let decayed = hp.eps_start * hp.eps_decay.powi(episode.min(i32::MAX as usize) as i32);
    decayed.max(hp.eps_min)
}

/// Result of one environment step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvStep {
    pub reward: f64,
    pub next: StateId,
    pub terminal: bool,
}

/// Episodic environment with a finite state space, as seen by [`train_env`].
pub trait Environment {
    fn state_count(&self) -> usize;

    fn action_count(&self) -> usize;

    /// Starts a new episode. `None` means the episode has no decision points.
    fn reset(&mut self) -> Option<StateId>;

    fn step(&mut self, action: usize) -> EnvStep;

    /// Whether the episode just finished was cut short.
    fn truncated(&self) -> bool {
        false
    }
}

/// One reward-curve point per training episode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub episode: usize,
    pub epsilon: f64,
    pub total_reward: f64,
    pub decisions: usize,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Training {
    pub table: QTable,
    pub curve: Vec<CurvePoint>,
    /// Number of `q_update` calls performed.
    pub updates: u64,
}

/// Runs the interaction loop on any [`Environment`].
///
/// Each step: select an epsilon-greedy action, step the environment, store
/// the transition, and once the buffer holds `batch_size` transitions, apply
/// one `q_update` per transition of a uniformly sampled batch.
pub fn train_env<E: Environment + ?Sized>(env: &mut E, hp: &Hyperparams) -> Result<Training> {
    hp.validate()?;
    let mut table = QTable::zeros(env.state_count(), env.action_count());
    let mut buffer = ReplayBuffer::new(hp.replay_capacity);
    let mut explore = rng::stream(hp.seed, Stream::Exploration);
    let mut replay = rng::stream(hp.seed, Stream::Replay);
    let mut curve = Vec::with_capacity(hp.episodes);
    let mut updates = 0u64;

    for episode in 0..hp.episodes {
        let epsilon = epsilon_schedule(episode, hp);
        let mut total_reward = 0.0;
        let mut decisions = 0;
        let mut state = env.reset();
        while let Some(s) = state {
            let a = select_action(&table, s, epsilon, &mut explore);
            let step = env.step(a);
            buffer.push(Transition {
                s,
                a,
                r: step.reward,
                s_next: step.next,
                terminal: step.terminal,
            });
            total_reward += step.reward;
            decisions += 1;
            if let Some(batch) = buffer.sample(hp.batch_size, &mut replay) {
                for t in &batch {
                    q_update(&mut table, t, hp.alpha, hp.gamma);
                }
                updates += batch.len() as u64;
            }
            state = (!step.terminal).then_some(step.next);
        }
        curve.push(CurvePoint {
            episode,
            epsilon,
            total_reward,
            decisions,
            truncated: env.truncated(),
        });
    }
    Ok(Training { table, curve, updates })
}

/// The cluster simulator wrapped as a learning environment.
pub struct ClusterEnv<'w> {
    workload: &'w [Task],
    config: SimConfig,
    scheme: DiscretizationScheme,
    episode: Option<Episode<'w>>,
}

impl<'w> ClusterEnv<'w> {
    pub fn new(workload: &'w [Task], config: &SimConfig, scheme: &DiscretizationScheme) -> Result<Self> {
        config.validate()?;
        scheme.validate()?;
        Ok(ClusterEnv {
            workload,
            config: config.clone(),
            scheme: scheme.clone(),
            episode: None,
        })
    }

    fn state(&self) -> StateId {
        let episode = self.episode.as_ref().expect("reset before use");
        discretize(&episode.cluster().observe(), &self.scheme)
    }
}

impl Environment for ClusterEnv<'_> {
    fn state_count(&self) -> usize {
        self.scheme.state_count()
    }

    fn action_count(&self) -> usize {
        Action::COUNT
    }

    fn reset(&mut self) -> Option<StateId> {
        let episode = Episode::new(self.workload, &self.config).expect("config validated in new");
        let done = episode.is_done();
        self.episode = Some(episode);
        (!done).then(|| self.state())
    }

    fn step(&mut self, action: usize) -> EnvStep {
        let action = Action::from_index(action).expect("action index in range");
        let scheme = &self.scheme;
        let episode = self.episode.as_mut().expect("reset before step");
        let (_, after, r) = episode.step(Decision::Action(action), |o| reward(o, scheme));
        EnvStep {
            reward: r,
            next: discretize(&after, scheme),
            terminal: episode.is_done(),
        }
    }

    fn truncated(&self) -> bool {
        self.episode.as_ref().is_some_and(Episode::is_truncated)
    }
}

/// Trains a fresh table on `workload` with the cluster simulator.
pub fn train(
    workload: &[Task],
    config: &SimConfig,
    scheme: &DiscretizationScheme,
    hp: &Hyperparams,
) -> Result<Training> {
    let mut env = ClusterEnv::new(workload, config, scheme)?;
    train_env(&mut env, hp)
}

/// Deploys a table with epsilon = 0.
#[derive(Debug, Clone)]
pub struct GreedyPolicy {
    table: QTable,
    scheme: DiscretizationScheme,
}

impl GreedyPolicy {
    pub fn new(table: QTable, scheme: DiscretizationScheme) -> Self {
        GreedyPolicy { table, scheme }
    }

    pub fn table(&self) -> &QTable {
        &self.table
    }

    pub fn choose(&self, obs: &crate::sim::Observation) -> Action {
        let state = discretize(obs, &self.scheme);
        Action::from_index(self.table.argmax(state)).expect("table has one column per action")
    }
}

pub fn greedy_policy(table: QTable, scheme: DiscretizationScheme) -> GreedyPolicy {
    GreedyPolicy::new(table, scheme)
}

impl Policy for GreedyPolicy {
    fn name(&self) -> &str {
        "q-greedy"
    }

    fn decide(&mut self, cluster: &ClusterState, _rng: &mut dyn RngCore) -> Decision {
        Decision::Action(self.choose(&cluster.observe()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_schedule_examples() {
        let hp = Hyperparams::default();
        assert_eq!(epsilon_schedule(0, &hp), 1.0);
        assert!((epsilon_schedule(1, &hp) - 0.95).abs() < 1e-15);
        assert!(0.95f64.powi(200) < 0.05);
        assert_eq!(epsilon_schedule(200, &hp), 0.05);
    }

    #[test]
    fn hyperparam_ranges() {
        let ok = Hyperparams::default();
        assert!(ok.validate().is_ok());
        for bad in [
            Hyperparams { alpha: 0.0, ..ok.clone() },
            Hyperparams { alpha: 1.5, ..ok.clone() },
            Hyperparams { gamma: 1.0, ..ok.clone() },
            Hyperparams { eps_min: -0.1, ..ok.clone() },
            Hyperparams { eps_decay: 0.0, ..ok.clone() },
            Hyperparams { batch_size: 0, ..ok.clone() },
            Hyperparams { batch_size: 20, replay_capacity: 10, ..ok.clone() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn zero_episodes_leaves_table_untouched() {
        let workload = vec![Task { id: 0, arrival_time: 0, duration: 2, cpu_req: 1.0, mem_req: 1.0, priority: 0 }];
        let hp = Hyperparams { episodes: 0, ..Hyperparams::default() };
        let out = train(&workload, &SimConfig::new(1, 4.0, 8.0), &DiscretizationScheme::default(), &hp).unwrap();
        assert!(out.table.values().iter().all(|&v| v == 0.0));
        assert!(out.curve.is_empty());
        assert_eq!(out.updates, 0);
    }

    #[test]
    fn zero_table_greedy_picks_action_zero() {
        let scheme = DiscretizationScheme::default();
        let policy = greedy_policy(QTable::zeros(scheme.state_count(), Action::COUNT), scheme);
        let obs = crate::sim::Observation { cpu_util: 0.4, mem_util: 0.7, queue_len: 3 };
        assert_eq!(policy.choose(&obs), Action::PackBestFit);
    }

    #[test]
    fn greedy_follows_row_argmax() {
        let scheme = DiscretizationScheme::default();
        let obs = crate::sim::Observation { cpu_util: 0.55, mem_util: 0.31, queue_len: 4 };
        let mut table = QTable::zeros(scheme.state_count(), Action::COUNT);
        table.row_mut(StateId(320)).copy_from_slice(&[-2.0, -1.5, -0.5, -3.0]);
        assert_eq!(greedy_policy(table, scheme).choose(&obs), Action::Defer);
    }
}

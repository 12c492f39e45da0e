//! Cluster-scheduling simulator with a tabular Q-learning scheduler.
//!
//! - [`sim`]: deterministic discrete-time cluster model and episode loop.
//! - [`qagent`]: state discretization, reward, epsilon-greedy selection,
//!   experience replay, and the Q-learning training loop.
//! - [`baselines`]: round-robin, priority, and best-fit (DRA) policies.
//! - [`workload`]: trace CSV parsing and synthetic workload generation.
//! - [`harness`]: metrics, policy comparison, learning-rate sweeps, reports.

pub mod baselines;
pub mod error;
pub mod format;
pub mod harness;
pub mod qagent;
pub mod rng;
pub mod sim;
pub mod workload;

pub use error::{Error, Result};

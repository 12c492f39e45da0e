use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{StateId, Transition};
use crate::error::{Error, Result};
use crate::format::sig9;

pub const QTABLE_HEADER: &str = "state_id,action_id,q_value";

/// Dense action-value table, row-major by state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    states: usize,
    actions: usize,
    values: Vec<f64>,
}

impl QTable {
    pub fn zeros(states: usize, actions: usize) -> Self {
        assert!(states > 0 && actions > 0, "table dimensions must be positive");
        QTable {
            states,
            actions,
            values: vec![0.0; states * actions],
        }
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    pub fn action_count(&self) -> usize {
        self.actions
    }

    pub fn get(&self, state: StateId, action: usize) -> f64 {
        self.values[self.offset(state, action)]
    }

    pub fn set(&mut self, state: StateId, action: usize, value: f64) {
        let i = self.offset(state, action);
        self.values[i] = value;
    }

    pub fn row(&self, state: StateId) -> &[f64] {
        let start = state.0 * self.actions;
        &self.values[start..start + self.actions]
    }

    pub fn row_mut(&mut self, state: StateId) -> &mut [f64] {
        let start = state.0 * self.actions;
        &mut self.values[start..start + self.actions]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self, state: StateId) -> f64 {
        self.row(state).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Greedy action for `state`; ties resolve to the lowest action index.
    pub fn argmax(&self, state: StateId) -> usize {
        argmax(self.row(state))
    }

    fn offset(&self, state: StateId, action: usize) -> usize {
        assert!(state.0 < self.states, "state {} out of range", state.0);
        assert!(action < self.actions, "action {action} out of range");
        state.0 * self.actions + action
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 24);
        out.push_str(QTABLE_HEADER);
        out.push('\n');
        for s in 0..self.states {
            for a in 0..self.actions {
                writeln!(out, "{s},{a},{}", sig9(self.values[s * self.actions + a])).expect("String write");
            }
        }
        out
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    /// Parses a table written by [`QTable::to_csv`]. Every `(state, action)`
    /// pair must appear exactly once, in ascending order.
    pub fn from_csv(text: &str, states: usize, actions: usize) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(QTABLE_HEADER) {
            return Err(Error::Format(format!("Q-table must start with `{QTABLE_HEADER}`")));
        }
        let mut table = QTable::zeros(states, actions);
        let mut count = 0;
        for (i, line) in lines.enumerate() {
            let row = i + 1;
            let bad = |message: String| Error::Validation { row, message };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let [s, a, q] = fields[..] else {
                return Err(bad(format!("expected 3 fields, found {}", fields.len())));
            };
            let s: usize = s.parse().map_err(|_| bad(format!("bad state id `{s}`")))?;
            let a: usize = a.parse().map_err(|_| bad(format!("bad action id `{a}`")))?;
            let q: f64 = q
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| bad(format!("bad q value `{q}`")))?;
            if (s, a) != (count / actions, count % actions) || s >= states {
                return Err(bad(format!("unexpected entry ({s}, {a})")));
            }
            table.values[count] = q;
            count += 1;
        }
        if count != states * actions {
            return Err(Error::Format(format!(
                "expected {} entries, found {count}",
                states * actions
            )));
        }
        Ok(table)
    }

    pub fn load_csv(path: impl AsRef<Path>, states: usize, actions: usize) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        QTable::from_csv(&text, states, actions)
    }
}

pub fn argmax(row: &[f64]) -> usize {
    row.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(best, best_v), (i, &v)| {
            if v > best_v {
                (i, v)
            } else {
                (best, best_v)
            }
        })
        .0
}

/// One temporal-difference step on the entry for `(t.s, t.a)`:
/// `Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a))`, where the
/// bootstrap term is zero for terminal transitions.
pub fn q_update(table: &mut QTable, t: &Transition, alpha: f64, gamma: f64) {
    let bootstrap = if t.terminal { 0.0 } else { table.max_value(t.s_next) };
    let current = table.get(t.s, t.a);
    table.set(t.s, t.a, current + alpha * (t.r + gamma * bootstrap - current));
}

/// Epsilon-greedy choice: one uniform draw decides whether to explore; an
/// exploring step draws the action uniformly, otherwise the tie-broken argmax.
pub fn select_action(table: &QTable, state: StateId, epsilon: f64, rng: &mut dyn RngCore) -> usize {
    if rng.random::<f64>() < epsilon {
        rng.random_range(0..table.action_count())
    } else {
        table.argmax(state)
    }
}

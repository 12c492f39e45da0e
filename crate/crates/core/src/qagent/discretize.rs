use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::Observation;

/// Index of a discretized state in `[0, scheme.state_count())`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateId(pub usize);

/// Maps continuous observations onto a finite grid.
///
/// CPU and memory utilization are split into uniform-width bins over `[0, 1]`.
/// Queue length falls into the first bucket whose upper bound is `>=` the
/// length; lengths above the last finite bound land in an overflow bucket, so
/// there are `queue_bounds.len() + 1` buckets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiscretizationScheme {
    pub cpu_bins: usize,
    pub mem_bins: usize,
    pub queue_bounds: Vec<usize>,
    /// Queue length that maps to a full unit of penalty in the reward.
    pub q_max_norm: f64,
}

impl Default for DiscretizationScheme {
    fn default() -> Self {
        DiscretizationScheme {
            cpu_bins: 10,
            mem_bins: 10,
            queue_bounds: vec![0, 2, 5, 10, 20],
            q_max_norm: 20.0,
        }
    }
}

impl DiscretizationScheme {
    pub fn validate(&self) -> Result<()> {
        if self.cpu_bins == 0 || self.mem_bins == 0 {
            return Err(Error::Config("cpu_bins and mem_bins must be at least 1".into()));
        }
        if self.queue_bounds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("queue_bounds must be strictly increasing".into()));
        }
        if !(self.q_max_norm.is_finite() && self.q_max_norm > 0.0) {
            return Err(Error::Config("q_max_norm must be positive".into()));
        }
        Ok(())
    }

    pub fn bucket_count(&self) -> usize {
        self.queue_bounds.len() + 1
    }

    pub fn state_count(&self) -> usize {
        self.cpu_bins * self.mem_bins * self.bucket_count()
    }

    pub fn encode(&self, cpu_bin: usize, mem_bin: usize, bucket: usize) -> StateId {
        let buckets = self.bucket_count();
        StateId(cpu_bin * self.mem_bins * buckets + mem_bin * buckets + bucket)
    }

    pub fn decode(&self, state: StateId) -> (usize, usize, usize) {
        let buckets = self.bucket_count();
        let cpu_bin = state.0 / (self.mem_bins * buckets);
        let rest = state.0 % (self.mem_bins * buckets);
        (cpu_bin, rest / buckets, rest % buckets)
    }

    fn bin(fraction: f64, bins: usize) -> usize {
        let f = if fraction.is_nan() { 0.0 } else { fraction.clamp(0.0, 1.0) };
        ((f * bins as f64).floor() as usize).min(bins - 1)
    }

    fn bucket(&self, queue_len: usize) -> usize {
        self.queue_bounds.partition_point(|&bound| bound < queue_len)
    }
}

pub fn discretize(obs: &Observation, scheme: &DiscretizationScheme) -> StateId {
    scheme.encode(
        DiscretizationScheme::bin(obs.cpu_util, scheme.cpu_bins),
        DiscretizationScheme::bin(obs.mem_util, scheme.mem_bins),
        scheme.bucket(obs.queue_len),
    )
}

/// Negative load: `-(cpu + mem + min(queue, q_max) / q_max)`, in `[-3, 0]`.
pub fn reward(obs: &Observation, scheme: &DiscretizationScheme) -> f64 {
    let queue = (obs.queue_len as f64).min(scheme.q_max_norm) / scheme.q_max_norm;
    -(obs.cpu_util.clamp(0.0, 1.0) + obs.mem_util.clamp(0.0, 1.0) + queue)
}

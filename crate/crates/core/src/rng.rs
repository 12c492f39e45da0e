//! Seeded random streams.
//!
//! Every consumer of randomness draws from its own ChaCha8 stream derived
//! from a single `u64` seed. The stream id is the ChaCha stream parameter, so
//! two purposes sharing a seed never observe correlated draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named purpose of a random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    /// Epsilon-greedy coin flips and random action draws.
    Exploration = 1,
    /// Replay-buffer batch indices.
    Replay = 2,
    /// Synthetic workload generation.
    Workload = 3,
    /// Draws handed to policies during evaluation episodes.
    Evaluation = 4,
}

pub fn stream(seed: u64, purpose: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose as u64);
    rng
}

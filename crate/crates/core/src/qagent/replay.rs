use std::collections::VecDeque;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::StateId;

/// One environment step as seen by the agent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub s: StateId,
    pub a: usize,
    pub r: f64,
    pub s_next: StateId,
    pub terminal: bool,
}

/// Fixed-capacity FIFO of transitions; the oldest entry is evicted first.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    items: VecDeque<Transition>,
    capacity: usize,
    inserted: u64,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayBuffer {
            items: VecDeque::with_capacity(capacity.min(1 << 16)),
            capacity,
            inserted: 0,
        }
    }

    pub fn push(&mut self, t: Transition) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(t);
        self.inserted += 1;
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Total pushes over the buffer's lifetime, including evicted entries.
    pub fn inserted(&self) -> u64 {
        self.inserted
    }

    /// Transition `i`, counted from the oldest retained entry.
    pub fn get(&self, i: usize) -> Option<&Transition> {
        self.items.get(i)
    }

    /// Index sequence for a batch: `batch_size` draws of
    /// `rng.random_range(0..len)`, with replacement, oldest entry = 0.
    /// `None` while the buffer holds fewer than `batch_size` transitions.
    pub fn sample_indices(&self, batch_size: usize, rng: &mut dyn RngCore) -> Option<Vec<usize>> {
        assert!(batch_size >= 1, "batch size must be positive");
        if self.items.len() < batch_size {
            return None;
        }
        let n = self.items.len();
        Some((0..batch_size).map(|_| rng.random_range(0..n)).collect())
    }

    pub fn sample(&self, batch_size: usize, rng: &mut dyn RngCore) -> Option<Vec<Transition>> {
        self.sample_indices(batch_size, rng)
            .map(|idx| idx.into_iter().map(|i| self.items[i]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    fn t(i: usize) -> Transition {
        Transition { s: StateId(i), a: 0, r: -(i as f64) / 1000.0, s_next: StateId(i + 1), terminal: false }
    }

    #[test]
    fn ring_keeps_the_newest() {
        let mut b = ReplayBuffer::new(2);
        b.push(t(0));
        assert_eq!(b.len(), 1);
        b.push(t(1));
        b.push(t(2));
        assert_eq!(b.len(), 2);
        assert_eq!(b.get(0), Some(&t(1)));
        assert_eq!(b.get(1), Some(&t(2)));
        assert_eq!(b.inserted(), 3);
        b.push(t(3));
        assert_eq!(b.inserted(), 4);
    }

    #[test]
    fn not_ready_below_batch_size() {
        let mut b = ReplayBuffer::new(100);
        for i in 0..31 {
            b.push(t(i));
        }
        let mut rng = stream(0, Stream::Replay);
        assert!(b.sample(32, &mut rng).is_none());
        b.push(t(31));
        assert_eq!(b.sample(32, &mut rng).unwrap().len(), 32);
    }

    #[test]
    fn single_element_batch() {
        let mut b = ReplayBuffer::new(4);
        b.push(t(9));
        let mut rng = stream(5, Stream::Replay);
        assert_eq!(b.sample(1, &mut rng), Some(vec![t(9)]));
    }

    #[test]
    fn sampled_indices_replay_the_documented_stream() {
        let mut b = ReplayBuffer::new(1000);
        for i in 0..100 {
            b.push(t(i));
        }
        let got = b.sample_indices(32, &mut stream(42, Stream::Replay)).unwrap();
        let mut rng = stream(42, Stream::Replay);
        let want: Vec<usize> = (0..32).map(|_| rng.random_range(0..100usize)).collect();
        assert_eq!(got, want);
        assert!(got.iter().all(|&i| i < 100));
        assert_eq!(
            got,
            [8, 18, 31, 29, 60, 51, 17, 12, 10, 27, 19, 47, 31, 54, 15, 29, 47, 13, 64, 13, 6, 20, 36, 89, 3, 68, 56, 64, 23, 46, 27, 45]
        );
    }
}

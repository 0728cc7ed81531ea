use std::collections::VecDeque;

use rand::seq::index::sample;
use rand::Rng;

/// One environment step as stored for TD learning. Observations are the raw
/// stacked frames; teachers store an empty goal.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub obs: Box<[u8]>,
    pub goal: Box<[f32]>,
    pub action: u8,
    pub reward: f32,
    pub next_obs: Box<[u8]>,
    pub done: bool,
}

/// A teacher demonstration step relabeled with the goal it led to.
#[derive(Clone, Debug, PartialEq)]
pub struct BcSample {
    pub obs: Box<[u8]>,
    pub goal: Box<[f32]>,
    pub action: u8,
}

/// Fixed-capacity FIFO buffer with uniform minibatch sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplayBuffer<X> {
    capacity: usize,
    items: VecDeque<X>,
}

impl<X> ReplayBuffer<X> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayBuffer {
            capacity,
            items: VecDeque::with_capacity(capacity.min(1 << 16)),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, item: X) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(item);
    }

    pub fn extend(&mut self, items: impl IntoIterator<Item = X>) {
        for item in items {
            self.push(item);
        }
    }

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &X> {
        self.items.iter()
    }

    /// Up to `n` distinct items, uniformly at random.
    pub fn sample(&self, rng: &mut impl Rng, n: usize) -> Vec<&X> {
        let n = n.min(self.items.len());
        sample(rng, self.items.len(), n)
            .into_iter()
            .map(|i| &self.items[i])
            .collect()
    }
}

//! Episodic memory: a last-N ring of (state digest, action) pairs used for
//! redundant-probe detection.

use crate::action::Action;
use std::collections::VecDeque;

pub const MEMORY_CAPACITY: usize = 10;

#[derive(Debug, Clone)]
pub struct EpisodeMemory {
    ring: VecDeque<(String, Action)>,
    capacity: usize,
}

impl EpisodeMemory {
    pub fn new(capacity: usize) -> Self {
        EpisodeMemory {
            ring: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    pub fn record(&mut self, state_digest: String, action: Action) {
        if self.ring.len() == self.capacity {
            self.ring.pop_front();
        }
        self.ring.push_back((state_digest, action));
    }

    /// True iff the pair occurs in the retained ring.
    pub fn lookup(&self, state_digest: &str, action: &Action) -> bool {
        self.ring
            .iter()
            .any(|(d, a)| d == state_digest && a == action)
    }

    pub fn len(&self) -> usize {
        self.ring.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ring.is_empty()
    }
}

impl Default for EpisodeMemory {
    fn default() -> Self {
        EpisodeMemory::new(MEMORY_CAPACITY)
    }
}

use rand::Rng;

use crate::gridworld::{Action, Position};

/// One stored experience. Positions are kept instead of encoded inputs;
/// `map` indexes the training map set the step was taken on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub map: usize,
    pub state: Position,
    pub action: Action,
    pub reward: f64,
    pub next_state: Position,
    pub terminal: bool,
}

/// Fixed-capacity ring buffer; the oldest entry is overwritten first.
#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    capacity: usize,
    items: Vec<Transition>,
    cursor: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayBuffer {
            capacity,
            items: Vec::with_capacity(capacity),
            cursor: 0,
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

    pub fn push(&mut self, t: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.cursor] = t;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
    }

    pub fn get(&self, index: usize) -> Option<&Transition> {
        self.items.get(index)
    }

    /// Uniform draw with replacement.
    pub fn sample<'a, R: Rng>(&'a self, rng: &mut R) -> Option<&'a Transition> {
        if self.items.is_empty() {
            return None;
        }
        Some(&self.items[rng.gen_range(0..self.items.len())])
    }
}

use rand::seq::index;

use crate::rng::Rng;

/// One step of experience for one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionTuple {
    pub s: [f64; 2],
    /// Clipped action that was applied.
    pub a: f64,
    pub r: f64,
    pub s_next: [f64; 2],
    /// Set on the last slot of the day.
    pub terminal: bool,
}

/// Fixed-capacity ring of transitions with its own sampling stream.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    items: Vec<TransitionTuple>,
    cursor: usize,
    rng: Rng,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, rng: Rng) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayBuffer {
            capacity,
            items: Vec::with_capacity(capacity.min(4096)),
            cursor: 0,
            rng,
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

    /// Appends, overwriting the oldest entry once full.
    pub fn push(&mut self, t: TransitionTuple) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.cursor] = t;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
    }

    pub fn iter(&self) -> impl Iterator<Item = &TransitionTuple> {
        self.items.iter()
    }

    /// `count` distinct slot indices drawn uniformly, or `None` when the
    /// buffer holds fewer than `count` tuples.
    pub fn sample_indices(&mut self, count: usize) -> Option<Vec<usize>> {
        if self.items.len() < count {
            return None;
        }
        Some(index::sample(&mut self.rng, self.items.len(), count).into_vec())
    }

    pub fn sample(&mut self, count: usize) -> Option<Vec<TransitionTuple>> {
        self.sample_indices(count)
            .map(|idx| idx.into_iter().map(|i| self.items[i]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn tuple(r: f64) -> TransitionTuple {
        TransitionTuple {
            s: [0.0; 2],
            a: 0.5,
            r,
            s_next: [0.0; 2],
            terminal: false,
        }
    }

    #[test]
    fn ring_eviction() {
        let mut b = ReplayBuffer::new(100, rng::split(1, 0, 0));
        for i in 0..101 {
            b.push(tuple(i as f64));
        }
        assert_eq!(b.len(), 100);
        assert!(b.iter().all(|t| t.r != 0.0));
        assert!(b.iter().any(|t| t.r == 100.0));
    }

    #[test]
    fn undersized_buffer_skips() {
        let mut b = ReplayBuffer::new(1000, rng::split(1, 0, 0));
        for i in 0..63 {
            b.push(tuple(i as f64));
        }
        assert!(b.sample(64).is_none());
        b.push(tuple(63.0));
        assert_eq!(b.sample(64).unwrap().len(), 64);
    }

    #[test]
    fn sampling_is_seeded_and_without_replacement() {
        let fill = |seed| {
            let mut b = ReplayBuffer::new(500, rng::split(seed, 0, 0));
            for i in 0..300 {
                b.push(tuple(i as f64));
            }
            b
        };
        let (mut a, mut b) = (fill(4), fill(4));
        for _ in 0..10 {
            let ia = a.sample_indices(64).unwrap();
            assert_eq!(ia, b.sample_indices(64).unwrap());
            let mut sorted = ia.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), 64);
        }
    }
}

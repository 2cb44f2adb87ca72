//! Ring-buffer transition storage with uniform batch sampling.

use rand_chacha::ChaCha8Rng;

use crate::env::OBS_DIM;

/// Stored action layout: `[duration, force_x, force_y]`.
pub const ACTION_DIM: usize = 3;

/// One `(s, a, r, s', done)` record. `truncated` marks episodes ended by the
/// step budget; those count as done for episode accounting but the critic
/// target still bootstraps through them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub state: [f32; OBS_DIM],
    pub action: [f32; ACTION_DIM],
    pub reward: f32,
    pub next_state: [f32; OBS_DIM],
    pub done: bool,
    pub truncated: bool,
}

impl Transition {
    /// 1.0 when the target should bootstrap through `next_state`.
    pub fn bootstrap_mask(&self) -> f32 {
        if self.done && !self.truncated {
            0.0
        } else {
            1.0
        }
    }
}

/// FIFO ring of transitions. Beyond capacity the oldest entry is replaced.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    data: Vec<Transition>,
    capacity: usize,
    cursor: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "capacity must be positive");
        ReplayBuffer { data: Vec::new(), capacity, cursor: 0 }
    }

    pub fn push(&mut self, t: Transition) {
        if self.data.len() < self.capacity {
            self.data.push(t);
        } else {
            self.data[self.cursor] = t;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn get(&self, idx: usize) -> &Transition {
        &self.data[idx]
    }

    /// Uniform batch indices without replacement within the batch.
    pub fn sample_indices(&self, rng: &mut ChaCha8Rng, batch: usize) -> Vec<usize> {
        assert!(batch <= self.data.len(), "batch larger than buffer");
        rand::seq::index::sample(rng, self.data.len(), batch).into_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive, Stream};

    fn t(tag: f32) -> Transition {
        Transition {
            state: [tag; OBS_DIM],
            action: [tag; ACTION_DIM],
            reward: tag,
            next_state: [tag; OBS_DIM],
            done: false,
            truncated: false,
        }
    }

    #[test]
    fn grows_until_capacity_then_evicts_fifo() {
        let mut buf = ReplayBuffer::new(3);
        for i in 0..3 {
            buf.push(t(i as f32));
            assert_eq!(buf.len(), i + 1);
        }
        buf.push(t(3.0));
        assert_eq!(buf.len(), 3);
        // Oldest slot now holds the newest record.
        assert_eq!(buf.get(0).reward, 3.0);
        assert_eq!(buf.get(1).reward, 1.0);
    }

    #[test]
    fn batch_indices_are_unique_and_in_range() {
        let mut buf = ReplayBuffer::new(100);
        for i in 0..50 {
            buf.push(t(i as f32));
        }
        let mut rng = derive(1, Stream::BufferSampling);
        let idx = buf.sample_indices(&mut rng, 32);
        assert_eq!(idx.len(), 32);
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 32, "indices must be distinct within a batch");
        assert!(idx.iter().all(|&i| i < 50));
    }

    #[test]
    fn bootstrap_mask_rules() {
        let mut x = t(0.0);
        assert_eq!(x.bootstrap_mask(), 1.0);
        x.done = true;
        assert_eq!(x.bootstrap_mask(), 0.0);
        x.truncated = true;
        assert_eq!(x.bootstrap_mask(), 1.0, "timeout bootstraps like non-terminal");
    }
}

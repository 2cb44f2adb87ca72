//! Seed fan-out: one root seed derives independent named streams so that a
//! change in one consumer (say, warmup action draws) cannot shift the random
//! sequence seen by another (say, task placement).

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named random streams used across a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    /// Environment task placement (agent/goal/obstacle positions).
    EnvPlacement = 0,
    /// Gaussian noise for stochastic policy sampling.
    PolicyNoise = 1,
    /// Uniform random actions before training starts.
    WarmupActions = 2,
    /// Replay batch index sampling.
    BufferSampling = 3,
    /// Network weight initialization.
    WeightInit = 4,
    /// Evaluation episode placement (kept apart from training placement).
    EvalPlacement = 5,
}

/// Derive the ChaCha stream for `stream` from a root seed.
pub fn derive(root_seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(stream as u64);
    rng
}

/// Restore a stream rng to a previously saved word position.
pub fn restore(root_seed: u64, stream: Stream, word_pos: u128) -> ChaCha8Rng {
    let mut rng = derive(root_seed, stream);
    rng.set_word_pos(word_pos);
    rng
}

//! Deterministic stream derivation for parallel Monte Carlo.
//!
//! Every stochastic routine takes a master seed and derives one ChaCha
//! substream per work item (sample index, sweep index, ...). Results are
//! then independent of thread count and schedule.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG for work item `stream` under master seed `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Two-level stream id (sweep index, item index).
pub fn stream_id(outer: u32, inner: u32) -> u64 {
    ((outer as u64) << 32) | inner as u64
}

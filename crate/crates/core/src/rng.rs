//! Counter-based seeded generators.
//!
//! Every randomized procedure in the crate derives its generator from a
//! `(seed, stream)` pair, so work item `i` draws the same numbers whether it
//! runs first, last or on another thread.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

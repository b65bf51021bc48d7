//! Seed streams.
//!
//! Every randomized routine draws from a ChaCha8 stream addressed by
//! `(seed, index)`, so a restart or trial produces the same numbers no
//! matter which worker thread runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent generator for sub-task `index` of a run seeded with `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

//! Reproducible random streams.
//!
//! Every stream is a ChaCha8 generator keyed by the campaign seed and
//! addressed by a 64-bit stream index, so stream `i` yields the same
//! sequence no matter which thread draws it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Default campaign seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed_f1a7_2019_0001;

/// Independent stream `index` of the family keyed by `seed`.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

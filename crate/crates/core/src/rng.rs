//! Counter-based random streams.
//!
//! Every random decision in the crate draws from `stream(master_seed, index)`:
//! a ChaCha8 generator keyed by the master seed with the index selecting the
//! 64-bit stream. Reads, recursion nodes and repetitions each get their own
//! index, so work can be reordered or run in parallel without changing output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream(master_seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Mixes a tag into a seed (splitmix64 finaliser) to get an independent child seed.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed
        .wrapping_add(tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x6A09_E667_F3BC_C909);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

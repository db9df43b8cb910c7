//! Counter-based random streams.
//!
//! Every draw is addressed by `(seed, domain, outer, inner)`: the ChaCha
//! stream selects `outer` and the word position selects `inner`, so a value
//! never depends on how many draws happened before it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const SCAN: u64 = 0x5ca9;
pub(crate) const FILTER: u64 = 0xf117;
pub(crate) const NOISE: u64 = 0x7015;

// Room for a handful of draws per address before running into the next one.
const WORDS_PER_ADDRESS: u128 = 64;

pub(crate) fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn keyed(seed: u64, domain: u64, outer: u64, inner: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed ^ splitmix(domain)));
    rng.set_stream(outer);
    rng.set_word_pos(u128::from(inner) * WORDS_PER_ADDRESS);
    rng
}

/// Derives an independent child seed, e.g. one per device in a scenario.
pub fn derive_seed(seed: u64, child: u64) -> u64 {
    splitmix(splitmix(seed) ^ child.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

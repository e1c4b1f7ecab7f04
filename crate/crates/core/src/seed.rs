//! Counter-based seed derivation.
//!
//! Child seeds depend only on the parent seed and the path of integer keys,
//! never on the order in which work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from `parent` and a path of keys.
pub fn derive(parent: u64, keys: &[u64]) -> u64 {
    keys.iter().fold(splitmix(parent.wrapping_add(GOLDEN)), |acc, &k| {
        splitmix(acc ^ splitmix(k.wrapping_add(GOLDEN).wrapping_mul(GOLDEN)))
    })
}

/// Stable 64-bit key for a string (FNV-1a), used to fold names into seed paths.
pub fn key_of(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

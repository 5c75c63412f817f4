//! Seed derivation.
//!
//! Every random stream in the crate is a `ChaCha8Rng` seeded from a 64-bit
//! value obtained by mixing a parent seed with integer or string keys. The mix
//! is a fixed function, so derived streams are stable across runs, platforms
//! and crate versions, and adding a sibling stream never perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combines a seed with one key.
pub fn mix(seed: u64, key: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ key.rotate_left(17) ^ 0xA076_1D64_78BD_642F)
}

/// Combines a seed with an ordered list of keys.
pub fn mix_all(seed: u64, keys: &[u64]) -> u64 {
    keys.iter().fold(splitmix64(seed), |acc, &k| mix(acc, k))
}

/// 64-bit FNV-1a of a string, used to turn names into stream keys.
pub fn name_key(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

//! Seeded random streams.
//!
//! Every consumer of randomness gets its own ChaCha stream derived from a
//! base seed and a path of indices (sweep point, trial, role, ...), so the
//! order in which trials execute never changes the numbers they see.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Roles used as the last path element when deriving per-trial streams.
pub mod role {
    pub const PLACEMENT: u64 = 1;
    pub const SHADOW_TARGET: u64 = 2;
    pub const SHADOW_INTERFERER: u64 = 3;
    pub const CHANNEL: u64 = 4;
    pub const TARGET_SIGNAL: u64 = 5;
    pub const INTERFERER_SIGNAL: u64 = 6;
    pub const NOISE: u64 = 7;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stream from `base_seed` and an index path.
pub fn stream(base_seed: u64, path: &[u64]) -> StreamRng {
    let mut h = splitmix64(base_seed);
    for &p in path {
        h = splitmix64(h ^ splitmix64(p.wrapping_add(0xA076_1D64_78BD_642F)));
    }
    ChaCha8Rng::seed_from_u64(h)
}

pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

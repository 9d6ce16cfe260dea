//! Seed handling.
//!
//! Every random quantity is drawn from a ChaCha stream whose seed is derived
//! from the run seed plus a (stream, index) counter, so work split across
//! threads or reordered still reproduces the same numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type LabRng = ChaCha8Rng;

/// Stream tags for the modules that draw randomness.
pub mod stream {
    pub const HAAR: u64 = 1;
    pub const ENSEMBLE: u64 = 2;
    pub const SMOOTH: u64 = 3;
    pub const PROTOCOL: u64 = 4;
    pub const REDIST: u64 = 5;
    pub const VERIFY: u64 = 6;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based seed derivation: a pure function of its three inputs.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(stream)).wrapping_add(index))
}

pub fn rng_from_seed(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(seed: u64, stream: u64, index: u64) -> LabRng {
    rng_from_seed(derive_seed(seed, stream, index))
}

//! Counter-based seed derivation.
//!
//! Every unit of randomised work (a fold split, a bag, an internal fold, a
//! forest) draws its generator from `derive_seed(base, path)`, where `path`
//! names the unit by stream tag and indices. Results are therefore the same
//! whether units run serially or in parallel, and independent of worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_FOLDS: u64 = 0x01;
pub const STREAM_BAGS: u64 = 0x02;
pub const STREAM_STACK: u64 = 0x03;
pub const STREAM_FOREST: u64 = 0x04;
pub const STREAM_HOLDOUT: u64 = 0x05;
pub const STREAM_CV_FOLD: u64 = 0x06;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `base` with each element of `path` in order.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn rng_for(base: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, path))
}

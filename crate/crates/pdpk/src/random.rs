//! Seeded randomness with named substreams.
//!
//! Every stochastic stage of the pipeline draws from its own substream,
//! derived by hashing the stage name into the root seed. Adding a new
//! consumer therefore never perturbs the draws of existing ones, and a
//! single root seed reproduces the whole dataset byte for byte.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used throughout the crate. ChaCha8 is portable: the same seed
/// yields the same stream on every platform.
pub type SeededRng = ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Derive a substream seed from the root seed and a stream name (FNV-1a).
pub fn substream_seed(root_seed: u64, name: &str) -> u64 {
    let mut h = FNV_OFFSET;
    for b in root_seed.to_le_bytes() {
        h = (h ^ u64::from(b)).wrapping_mul(FNV_PRIME);
    }
    for b in name.as_bytes() {
        h = (h ^ u64::from(*b)).wrapping_mul(FNV_PRIME);
    }
    h
}

/// Create the RNG for a named substream of `root_seed`.
pub fn substream(root_seed: u64, name: &str) -> SeededRng {
    SeededRng::seed_from_u64(substream_seed(root_seed, name))
}

//! Deterministic random draws. Every randomized routine takes an explicit
//! seed and uses this stream cipher generator, so identical inputs give
//! bitwise identical outputs on every platform.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub(crate) fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in `[0, 1)` with 53 random bits.
pub(crate) fn next_unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / 9_007_199_254_740_992.0
}

/// Uniform in `0..bound`.
pub(crate) fn next_below(rng: &mut ChaCha8Rng, bound: usize) -> usize {
    (next_unit(rng) * bound as f64) as usize % bound.max(1)
}

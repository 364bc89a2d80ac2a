//! Deterministic random streams.
//!
//! Every stream is a SplitMix64 generator. Derived seeds are produced by
//! folding coordinates into the parent seed with the SplitMix64 finalizer,
//! so a child stream depends only on `(parent, coordinates)` and never on
//! the order in which siblings are processed.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a list of coordinates.
pub fn derive_seed(parent: u64, coords: &[u64]) -> u64 {
    coords.iter().fold(mix64(parent), |acc, &c| {
        mix64(acc.wrapping_add(GOLDEN_GAMMA).wrapping_add(mix64(c)))
    })
}

/// Hashes a text label into a coordinate for [`derive_seed`].
pub fn label_coord(label: &str) -> u64 {
    label
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

#[derive(Debug, Clone)]
pub struct Rng {
    inner: SplitMix64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            inner: SplitMix64::seed_from_u64(seed),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `[0, bound)` by multiply-shift. `bound` must be > 0.
    #[inline]
    pub fn index(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as usize
    }
}

//! The single source of randomness.
//!
//! State transition (all arithmetic mod 2^64):
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output z ^ (z >> 31)
//! ```
//!
//! A uniform draw on `[0, 1)` is `(output >> 11) * 2^-53`. Sub-streams are
//! seeded with `seed ^ (stream * 0xD1B54A32D192ED03)`.

use rand::RngCore;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

pub struct Stream(SplitMix64);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream(SplitMix64::from_seed(seed.to_le_bytes()))
    }

    /// An independent stream keyed by `stream`.
    pub fn derive(seed: u64, stream: u64) -> Self {
        Stream::new(seed ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Integer in `[lo, hi)`; `hi > lo`.
    pub fn below(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.uniform() * (hi - lo) as f64) as usize
    }
}

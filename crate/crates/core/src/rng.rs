//! Seeded random streams.
//!
//! Every stream is a xoshiro256++ generator seeded through SplitMix64 from
//! `seed ^ index.wrapping_mul(STREAM_MULTIPLIER)`. Float and index draws use
//! fixed conversions so results are identical on every platform.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// Odd multiplier used to derive per-index streams.
pub const STREAM_MULTIPLIER: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone)]
pub struct Stream(Xoshiro256PlusPlus);

impl Stream {
    pub fn new(seed: u64, index: u64) -> Self {
        Stream(Xoshiro256PlusPlus::seed_from_u64(
            seed ^ index.wrapping_mul(STREAM_MULTIPLIER),
        ))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Unbiased integer in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        let n = n as u64;
        // Lemire's multiply-shift with rejection.
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            let low = m as u64;
            if low >= n.wrapping_neg() % n {
                return (m >> 64) as usize;
            }
        }
    }

    /// `count` distinct indices from `0..n` in draw order (partial
    /// Fisher-Yates).
    pub fn sample_without_replacement(&mut self, n: usize, count: usize) -> alloc::vec::Vec<usize> {
        let count = count.min(n);
        let mut pool: alloc::vec::Vec<usize> = (0..n).collect();
        for i in 0..count {
            let j = i + self.below(n - i);
            pool.swap(i, j);
        }
        pool.truncate(count);
        pool
    }
}

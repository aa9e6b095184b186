//! Seeded randomness with a pinned draw discipline.
//!
//! Every stochastic component draws from [`DetRng`], a ChaCha8 stream seeded
//! through the standard SplitMix64 expansion of a 64-bit seed. The helpers
//! here define exactly how raw draws map to indices and probabilities, so a
//! port in another language can reproduce runs bit for bit:
//!
//! * [`DetRng::unit`] consumes one `u64` and keeps its top 53 bits as a
//!   float in `[0, 1)`.
//! * [`DetRng::chance`] consumes exactly one draw regardless of outcome.
//! * [`DetRng::index`] rejection-samples `u64 % n`, discarding draws from
//!   the biased tail, so every index is exactly equally likely.
//!
//! Callers document their draw order; together with this mapping that makes
//! the whole optimizer trajectory part of the output format.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct DetRng(ChaCha8Rng);

impl DetRng {
    pub fn new(seed: u64) -> DetRng {
        DetRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform float in `[0, 1)` with 53 bits of precision. One draw.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// True with probability `p` (clamped to `[0, 1]`). Always one draw.
    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// Uniform index in `0..n`. Panics if `n` is zero.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "cannot draw from an empty range");
        let n64 = n as u64;
        // Largest multiple of n that fits; draws at or above it would bias
        // the low indices and are rejected.
        let zone = (u64::MAX / n64) * n64;
        loop {
            let draw = self.next_u64();
            if draw < zone {
                return (draw % n64) as usize;
            }
        }
    }

    /// `count` distinct values from `0..n` via a partial Fisher-Yates pass,
    /// in draw order. Panics if `count > n`.
    pub fn distinct(&mut self, count: usize, n: usize) -> Vec<usize> {
        assert!(count <= n, "cannot draw {count} distinct values from 0..{n}");
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..count {
            let j = i + self.index(n - i);
            pool.swap(i, j);
        }
        pool.truncate(count);
        pool
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = DetRng::new(42);
        let mut b = DetRng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn different_seeds_diverge() {
        let mut a = DetRng::new(1);
        let mut b = DetRng::new(2);
        let same = (0..16).filter(|_| a.next_u64() == b.next_u64()).count();
        assert_eq!(same, 0);
    }

    #[test]
    fn unit_stays_in_range() {
        let mut rng = DetRng::new(7);
        for _ in 0..10_000 {
            let u = rng.unit();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn chance_extremes() {
        let mut rng = DetRng::new(7);
        for _ in 0..100 {
            assert!(!rng.chance(0.0));
            assert!(rng.chance(1.1));
        }
    }

    #[test]
    fn index_covers_range_uniformly_enough() {
        let mut rng = DetRng::new(9);
        let mut counts = [0usize; 5];
        for _ in 0..50_000 {
            counts[rng.index(5)] += 1;
        }
        for &c in &counts {
            // Each bucket expects 10_000; allow a generous band.
            assert!((9_000..11_000).contains(&c), "counts {counts:?}");
        }
    }

    #[test]
    fn distinct_draws_are_distinct() {
        let mut rng = DetRng::new(11);
        for _ in 0..200 {
            let picks = rng.distinct(10, 24);
            let mut sorted = picks.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), 10);
        }
    }

    #[test]
    fn distinct_full_range_is_a_permutation() {
        let mut rng = DetRng::new(13);
        let mut picks = rng.distinct(24, 24);
        picks.sort_unstable();
        assert_eq!(picks, (0..24).collect::<Vec<_>>());
    }
}

//! Seedable random number generation.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood; the engine behind Java's
//! `SplittableRandom`): a 64-bit counter advanced by the golden-ratio constant
//! and passed through a finalizing mixer. Output sequences are a pure function
//! of the seed; the same seed replays the same stream on every run of this
//! implementation. Cross-implementation bit-identity is not promised.

use crate::error::{Error, Result};
use crate::real::Real;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic stream of pseudo-random values.
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    counter: u64,
    spare_gaussian: Option<f64>,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            counter: seed,
            spare_gaussian: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derives an independent stream for a tagged subtask, e.g. a trial index.
    /// Callers running parallel work give each task its own derived state.
    pub fn derive(base_seed: u64, tags: &[u64]) -> Self {
        let mixed = tags.iter().fold(base_seed, |acc, &t| {
            mix64(acc ^ mix64(t.wrapping_add(GOLDEN_GAMMA)))
        });
        Self::new(mixed)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(GOLDEN_GAMMA);
        mix64(self.counter)
    }

    /// Uniform in [0, 1) with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, bound) without modulo bias.
    pub fn uniform_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let x = self.next_u64();
            let (hi, lo) = {
                let wide = (x as u128) * (bound as u128);
                ((wide >> 64) as u64, wide as u64)
            };
            if lo >= threshold {
                return hi;
            }
        }
    }

    /// Standard normal draw via the Marsaglia polar transform.
    ///
    /// The transform is exact (no tail truncation), which matters more here
    /// than raw speed.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare_gaussian.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let factor = (-2.0 * s.ln() / s).sqrt();
                self.spare_gaussian = Some(v * factor);
                return u * factor;
            }
        }
    }

    /// `count` i.i.d. standard normal values.
    pub fn gaussian_vec<T: Real>(&mut self, count: usize) -> Vec<T> {
        (0..count)
            .map(|_| T::from_f64(self.gaussian()).unwrap())
            .collect()
    }

    /// `count` i.i.d. Rademacher (+1/-1) values.
    pub fn rademacher_vec<T: Real>(&mut self, count: usize) -> Vec<T> {
        (0..count)
            .map(|_| {
                if self.next_u64() & 1 == 0 {
                    T::one()
                } else {
                    -T::one()
                }
            })
            .collect()
    }

    /// `count` distinct indices drawn uniformly from `0..population`,
    /// via a partial Fisher-Yates shuffle.
    pub fn sample_without_replacement(
        &mut self,
        population: usize,
        count: usize,
    ) -> Result<Vec<usize>> {
        if count > population {
            return Err(Error::CountExceedsPopulation { count, population });
        }
        let mut pool: Vec<usize> = (0..population).collect();
        for i in 0..count {
            let j = i + self.uniform_below((population - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(count);
        Ok(pool)
    }
}

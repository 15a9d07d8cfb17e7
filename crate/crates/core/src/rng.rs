//! Seeded random stream used by every stochastic routine in the crate.
//!
//! The generator is ChaCha8 (`rand_chacha` 0.3) seeded through
//! `SeedableRng::seed_from_u64`. Floating-point draws are built directly from
//! the top 53 bits of `next_u64`, so a seed reproduces the same numbers on any
//! platform.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::state::Level;

const SCALE: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Debug, Clone)]
pub struct Stream(ChaCha8Rng);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform on `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * SCALE
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn open_unit(&mut self) -> f64 {
        ((self.0.next_u64() >> 11) as f64 + 0.5) * SCALE
    }

    /// Uniform level in `0..=max_state`.
    pub fn level(&mut self, max_state: Level) -> Level {
        let span = max_state as u64 + 1;
        // rejection keeps the draw unbiased
        let zone = u64::MAX - (u64::MAX % span);
        loop {
            let r = self.0.next_u64();
            if r < zone {
                return (r % span) as Level;
            }
        }
    }

    pub fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        let span = bound as u64;
        let zone = u64::MAX - (u64::MAX % span);
        loop {
            let r = self.0.next_u64();
            if r < zone {
                return (r % span) as usize;
            }
        }
    }
}

//! Portable 64-bit linear congruential generator.
//!
//! Every random choice in the crate and the CLI goes through this generator so
//! that mark sequences can be reproduced in any language:
//!
//! ```text
//! state <- state * 6364136223846793005 + 1442695040888963407   (mod 2^64)
//! output = state >> 33                                         (31 bits)
//! index  = output mod count
//! ```
//!
//! The state starts at the seed and is advanced before every output.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lcg {
    state: u64,
}

pub const LCG_MULTIPLIER: u64 = 6364136223846793005;
pub const LCG_INCREMENT: u64 = 1442695040888963407;

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    /// Advances the state and returns its top 31 bits.
    pub fn next_u32(&mut self) -> u32 {
        self.state = self
            .state
            .wrapping_mul(LCG_MULTIPLIER)
            .wrapping_add(LCG_INCREMENT);
        (self.state >> 33) as u32
    }

    /// `next_u32() % count`. Panics when `count == 0`.
    pub fn below(&mut self, count: usize) -> usize {
        assert!(count > 0, "empty range");
        self.next_u32() as usize % count
    }

    /// Uniform sample in `[0, 1)` with 31 bits of resolution.
    pub fn unit(&mut self) -> f64 {
        self.next_u32() as f64 / (1u64 << 31) as f64
    }

    /// Uniform sample in `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Fisher-Yates shuffle driven by [`Lcg::below`].
    pub fn shuffle<X>(&mut self, items: &mut [X]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

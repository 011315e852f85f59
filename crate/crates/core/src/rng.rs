//! Deterministic pseudo-random numbers for simulation and data generation.
//!
//! SplitMix64 (Sebastiano Vigna's reference constants) drives everything that
//! is random in this crate. Pure integer arithmetic, so the same seed yields
//! the same stream on every platform, which keeps generated datasets and
//! simulated runs byte-identical across machines.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// 2^-53, the grid step of [`SplitMix64::uniform01`].
const U53: f64 = 1.0 / 9_007_199_254_740_992.0;

/// SplitMix64 generator. 64 bits of state, fully determined by the seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Next 64-bit output of the reference SplitMix64 step.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in (0, 1]: the top 53 bits scaled by 2^-53, with an
    /// exact zero remapped to 2^-53 so `ln` is always defined.
    #[inline]
    pub fn uniform01(&mut self) -> f64 {
        let x = (self.next_u64() >> 11) as f64 * U53;
        if x == 0.0 {
            U53
        } else {
            x
        }
    }

    /// Box-Muller Gaussian draw: `mu + sigma * sqrt(-2 ln u1) * cos(2 pi u2)`
    /// from two consecutive uniform draws.
    pub fn gaussian(&mut self, mu: f64, sigma: f64) -> f64 {
        let u1 = self.uniform01();
        let u2 = self.uniform01();
        let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        mu + sigma * z
    }
}

/// In-place Fisher-Yates shuffle driven by `rng`.
pub fn shuffle<T>(rng: &mut SplitMix64, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        items.swap(i, j);
    }
}

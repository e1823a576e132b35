//! Deterministic random-number source shared by every stochastic step.
//!
//! The generator is PCG32 (64-bit LCG state, XSH-RR output, 32-bit output)
//! from `rand_pcg`, always constructed with the fixed default stream
//! increment so that a seed fully determines the stream. On top of the raw
//! 32-bit outputs this module fixes every derived draw:
//!
//! * `next_f64`: two outputs are concatenated into a `u64`, the top 53 bits
//!   are kept and scaled by 2^-53, giving a value in `[0, 1)`.
//! * `below(n)`: the widening multiply `(u64 * n) >> 64`.
//! * `standard_normal`: Box–Muller on `u1 = 1 - next_f64()` and
//!   `u2 = next_f64()`; both deviates of a pair are used, the second one
//!   is cached.
//! * `shuffle`: Fisher–Yates from the last index down.
//!
//! Child generators are seeded with `seed ^ splitmix64(stream_id)`.

use rand_core::RngCore;
use rand_pcg::Pcg32;

/// Default PCG32 stream increment (the value used by the reference `pcg32`).
const PCG_STREAM: u64 = 0x0a02_bdbf_7bb3_c0a7;

/// Source of the random draws used by resampling and splitting.
///
/// [`Rng`] is the production implementation; the trait exists so tests can
/// pin draws to interpolation endpoints.
pub trait RandomSource {
    /// Uniform real in `[0, 1)`.
    fn next_f64(&mut self) -> f64;

    /// Uniform integer in `0..n`. `n` must be positive.
    fn below(&mut self, n: usize) -> usize;

    /// Standard normal deviate.
    fn standard_normal(&mut self) -> f64;

    /// Independent generator for a numbered sub-task.
    fn child(&self, stream_id: u64) -> Self
    where
        Self: Sized;

    /// Uniform real in `[low, high)`.
    fn uniform(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.next_f64()
    }

    /// In-place Fisher–Yates shuffle.
    fn shuffle<T>(&mut self, items: &mut [T])
    where
        Self: Sized,
    {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

/// Seeded PCG32 generator.
#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    inner: Pcg32,
    spare_normal: Option<f64>,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self { seed, inner: Pcg32::new(seed, PCG_STREAM), spare_normal: None }
    }

    /// The seed this generator was created from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    pub fn next_u64(&mut self) -> u64 {
        let hi = u64::from(self.inner.next_u32());
        let lo = u64::from(self.inner.next_u32());
        (hi << 32) | lo
    }
}

/// Seed for child stream `stream_id` of a generator seeded with `seed`.
pub fn derive_seed(seed: u64, stream_id: u64) -> u64 {
    seed ^ splitmix64(stream_id)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RandomSource for Rng {
    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0) has no valid output");
        ((u128::from(self.next_u64()) * n as u128) >> 64) as usize
    }

    fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(radius * angle.sin());
        radius * angle.cos()
    }

    fn child(&self, stream_id: u64) -> Self {
        Rng::new(derive_seed(self.seed, stream_id))
    }
}

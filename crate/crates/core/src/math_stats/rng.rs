//! Seedable, platform-stable random stream.
//!
//! `RngState` wraps ChaCha8 (8-round ChaCha stream cipher used as a PRNG).
//! The 256-bit key is expanded from the 64-bit seed with the PCG32-based
//! `seed_from_u64` routine of `rand_core`, and ChaCha's 64-bit stream id
//! selects one of 2^64 independent sub-streams of the same key. Both the
//! cipher and the key expansion are specified bit-for-bit, so a seed yields
//! the same output on every platform.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn from_seed(seed: u64) -> Self {
        Self::derive(seed, 0)
    }

    /// Opens sub-stream `stream` of `seed`. Distinct stream ids of one seed
    /// never overlap.
    pub fn derive(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform variate in `[0, 1)` with 53 bits of precision.
    pub fn next_uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform variate in `[low, high)`.
    pub fn uniform_in(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.next_uniform()
    }

    /// Standard normal variate (ziggurat).
    pub fn next_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

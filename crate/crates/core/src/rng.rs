//! Seeded SplitMix64 stream with the derived draws used across the crate.
//!
//! Every derived draw consumes exactly one 64-bit output so sequences are
//! reproducible from the seed alone.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

#[derive(Debug, Clone)]
pub struct Rng(SplitMix64);

impl Rng {
    /// Generator whose internal state starts at `seed`.
    pub fn new(seed: u64) -> Self {
        Self(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform integer in `0..n` (multiply-high reduction). `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range_inclusive(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below((hi - lo + 1) as u64) as usize
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-1, 1)`.
    pub fn symmetric_f64(&mut self) -> f64 {
        2.0 * self.unit_f64() - 1.0
    }

    /// Fisher–Yates shuffle, last position first.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }

    /// Complex vector with real and imaginary parts uniform in `[-1, 1)`.
    pub fn complex_vector(&mut self, n: usize) -> DVector<Complex64> {
        DVector::from_fn(n, |_, _| Complex64::new(self.symmetric_f64(), self.symmetric_f64()))
    }

    /// Complex matrix with entries as in [`Rng::complex_vector`], column-major.
    pub fn complex_matrix(&mut self, n: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(n, n, |_, _| Complex64::new(self.symmetric_f64(), self.symmetric_f64()))
    }
}

//! Shared fixtures for the benchmarks.

use specdecay::numerics::{random_matrix, ComplexMatrix};
use specdecay::PrecisionContext;

pub fn context(bits: u32) -> PrecisionContext {
    PrecisionContext::new(bits, 0).expect("bench precision is in range")
}

/// A seeded dense `n x n` test matrix.
pub fn dense(n: usize, bits: u32) -> ComplexMatrix {
    random_matrix(n, n, &context(bits))
}

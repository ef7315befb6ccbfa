//! Shared fixtures for the benchmarks.

use lkh_core::linalg::ComplexMatrix;
use lkh_core::rng::{complex_gaussian_vec, stream_rng};
use lkh_core::verifier::LkhInstance;

/// Seeded random Hermitian matrix of size `n`.
pub fn hermitian(n: usize, seed: u64) -> ComplexMatrix {
    let g = ComplexMatrix::from_vec(n, n, complex_gaussian_vec(&mut stream_rng(seed, 0), n * n))
        .expect("square");
    g.add(&g.adjoint()).expect("same shape").scale(0.5)
}

/// Seeded random square matrix of size `n`.
pub fn square(n: usize, seed: u64) -> ComplexMatrix {
    ComplexMatrix::from_vec(n, n, complex_gaussian_vec(&mut stream_rng(seed, 1), n * n))
        .expect("square")
}

/// Seeded LKH instance with invertible marginals.
pub fn instance(dims: [usize; 3], seed: u64) -> LkhInstance {
    LkhInstance::random(dims, &mut stream_rng(seed, 2), true).expect("instance")
}

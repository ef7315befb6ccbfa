//! Multipartite density-matrix linear algebra and numerical verifiers for the
//! LKH operator inequality ρ₁⁻¹⊗σ₂₃ ≤ ρ₁₂⁻¹⊗σ₃ and strong
//! subadditivity of von Neumann entropy.
//!
//! Layers, bottom up:
//!
//! - [`linalg`]: dense complex matrices, a cyclic Jacobi Hermitian
//!   eigensolver, spectral matrix functions and Loewner-order checks.
//! - [`tensor`]: Kronecker products, partial traces, embeddings and factor
//!   permutations under a row-major composite index.
//! - [`states`]: density matrices, seeded random states, Schmidt
//!   decomposition and purification.
//! - [`entropy`]: von Neumann entropy and the tripartite entropy gaps.
//! - [`verifier`]: executable checks for the operator inequality, its log
//!   form, the pure-state lemma behind it, and the absence of equality cases.

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropy;
pub mod error;
pub mod linalg;
pub mod rng;
pub mod states;
pub mod tensor;
pub mod verifier;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, HermitianEigen, MatFn};
pub use num_complex::Complex64;
pub use states::{DensityMatrix, SchmidtDecomposition, StateVector};
pub use tensor::{MultiSystem, SubsystemSet};
pub use verifier::GapReport;

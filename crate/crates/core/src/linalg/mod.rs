//! Dense complex matrices, Hermitian eigendecomposition, spectral matrix
//! functions and operator-order checks.

mod eigen;
mod funcs;
mod matrix;

pub use eigen::{eig_hermitian, HermitianEigen, HERMITIAN_TOL, MAX_SWEEPS, OFF_DIAGONAL_TOL};
pub use funcs::{
    loewner_leq, mat_fn, mat_fn_from_eigen, max_eigenvalue, min_eigenvalue, MatFn, CLAMP_TOL,
    CONDITION_TOL, LOEWNER_TOL,
};
pub(crate) use matrix::{c, check_dimension};
pub use matrix::{
    dimension_cap, inner, set_dimension_cap, vec_norm, ComplexMatrix, DEFAULT_DIMENSION_CAP,
};

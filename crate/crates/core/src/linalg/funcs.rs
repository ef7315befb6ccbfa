use super::eigen::{eig_hermitian, HermitianEigen};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Relative floor on the spectrum for inverse, log and inverse square root.
pub const CONDITION_TOL: f64 = 1e-10;
/// Negative eigenvalues down to `-CLAMP_TOL * ‖A‖_F` are treated as roundoff.
pub const CLAMP_TOL: f64 = 1e-12;
/// Default tolerance for [`loewner_leq`].
pub const LOEWNER_TOL: f64 = 1e-9;

/// Scalar function applied to the spectrum by [`mat_fn`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatFn {
    Inverse,
    Log,
    Sqrt,
    InverseSqrt,
}

impl MatFn {
    fn eval(self, x: f64) -> f64 {
        match self {
            MatFn::Inverse => 1.0 / x,
            MatFn::Log => x.ln(),
            MatFn::Sqrt => x.max(0.0).sqrt(),
            MatFn::InverseSqrt => 1.0 / x.sqrt(),
        }
    }
}

/// Check the spectrum against the domain of `f`. Sqrt admits roundoff
/// negatives, which evaluate to zero.
fn admit(e: &HermitianEigen, f: MatFn, norm: f64) -> Result<()> {
    let min = e.min();
    let max = e.max();
    let clamp_floor = -CLAMP_TOL * norm;
    match f {
        MatFn::Sqrt => {
            if min < clamp_floor {
                return Err(Error::DomainError { min_eig: min });
            }
        }
        MatFn::Log | MatFn::Inverse | MatFn::InverseSqrt => {
            if matches!(f, MatFn::Log | MatFn::InverseSqrt) && min < clamp_floor {
                return Err(Error::DomainError { min_eig: min });
            }
            let threshold = CONDITION_TOL * max;
            if !(min > threshold && min > 0.0) {
                return Err(Error::IllConditioned {
                    min_eig: min,
                    threshold,
                });
            }
        }
    }
    Ok(())
}

/// U f(Λ) U† for Hermitian `a`.
pub fn mat_fn(a: &ComplexMatrix, f: MatFn) -> Result<ComplexMatrix> {
    let e = eig_hermitian(a, false)?;
    mat_fn_from_eigen(&e, f, a.frobenius_norm())
}

/// Same as [`mat_fn`] but reusing an existing decomposition of a matrix with
/// Frobenius norm `norm`.
pub fn mat_fn_from_eigen(e: &HermitianEigen, f: MatFn, norm: f64) -> Result<ComplexMatrix> {
    admit(e, f, norm)?;
    Ok(e.reconstruct_with(|x| f.eval(x)))
}

pub fn min_eigenvalue(a: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(a, false)?.min())
}

pub fn max_eigenvalue(a: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(a, false)?.max())
}

/// Operator-order test `a ≤ b`.
///
/// Returns `(verdict, gap)` with `gap = λ_min(b − a)` and the verdict
/// `gap ≥ −tol · max(1, ‖b − a‖_F)`.
pub fn loewner_leq(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<(bool, f64)> {
    let diff = b.sub(a)?;
    let gap = min_eigenvalue(&diff)?;
    let verdict = gap >= -tol * diff.frobenius_norm().max(1.0);
    Ok((verdict, gap))
}

//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each step applies a unitary plane rotation J on coordinates (p, q) so that
//! (J†AJ)_pq = 0. Writing a_pq = |a_pq| e^{iφ}, the rotation is the real
//! Jacobi rotation conjugated by diag(1, e^{-iφ}):
//!
//! ```text
//! J_pp = c    J_pq = s e^{iφ}
//! J_qp = -s e^{-iφ}    J_qq = c
//! ```
//!
//! Sweeps continue until the off-diagonal Frobenius mass drops to
//! `OFF_DIAGONAL_TOL * ‖A‖_F`, or `MAX_SWEEPS` is exceeded.

use num_complex::Complex64;

use super::matrix::{c, ComplexMatrix};
use crate::error::{Error, Result};

/// Relative Hermitian-deviation bound accepted by [`eig_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Convergence threshold on off-diagonal Frobenius mass, relative to ‖A‖_F.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;
pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// The j-th eigenvector.
    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        self.eigenvectors.col(j)
    }

    /// U f(Λ) U†.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = c(0.0, 0.0);
                for (k, &w) in fl.iter().enumerate() {
                    if w != 0.0 {
                        acc += u[(i, k)] * u[(j, k)].conj() * w;
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)] = c(out[(i, i)].re, 0.0);
        }
        out
    }

    /// U Λ U†.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Hermitian eigendecomposition.
///
/// With `symmetrize` set the input is first replaced by (A + A†)/2;
/// otherwise a Hermitian deviation above `HERMITIAN_TOL * max(1, ‖A‖_F)` is
/// rejected. The Hermitian part is used internally in either case.
pub fn eig_hermitian(a: &ComplexMatrix, symmetrize: bool) -> Result<HermitianEigen> {
    let n = a.require_square()?;
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let norm = a.frobenius_norm();
    if !symmetrize {
        let deviation = a.hermitian_deviation()?;
        let bound = HERMITIAN_TOL * norm.max(1.0);
        if deviation > bound {
            return Err(Error::NonHermitian { deviation, bound });
        }
    }
    let mut m = a.hermitian_part()?;
    let mut v = ComplexMatrix::identity(n);
    let target = OFF_DIAGONAL_TOL * m.frobenius_norm();

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&m);
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NonConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// Annihilate m[p][q] with one unitary rotation, accumulating it into `v`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let phase = apq / mag;

    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        // |theta| overflowed: the rotation is negligible but still well defined.
        0.5 / theta
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;
    let s_fwd = phase * sn; // s e^{iφ}
    let s_bwd = phase.conj() * sn; // s e^{-iφ}

    let n = m.rows();
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        let new_kp = akp * cs - s_bwd * akq;
        let new_kq = s_fwd * akp + akq * cs;
        m[(k, p)] = new_kp;
        m[(p, k)] = new_kp.conj();
        m[(k, q)] = new_kq;
        m[(q, k)] = new_kq.conj();
    }
    m[(p, p)] = c(app - t * mag, 0.0);
    m[(q, q)] = c(aqq + t * mag, 0.0);
    m[(p, q)] = c(0.0, 0.0);
    m[(q, p)] = c(0.0, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cs - s_bwd * vkq;
        v[(k, q)] = s_fwd * vkp + vkq * cs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &ComplexMatrix, e: &HermitianEigen) -> f64 {
        a.sub(&e.reconstruct()).unwrap().frobenius_norm()
    }

    #[test]
    fn diagonal_input_sorted() {
        let a = ComplexMatrix::from_real_diag(&[3.0, 1.0, 2.0]);
        let e = eig_hermitian(&a, false).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 2.0, 3.0]);
        // eigenvectors are the permuted standard basis
        let expected_cols = [1, 2, 0];
        for (j, &row) in expected_cols.iter().enumerate() {
            assert_eq!(e.eigenvectors[(row, j)].norm(), 1.0);
        }
    }

    #[test]
    fn pauli_x() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let e = eig_hermitian(&a, false).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-15);
        assert!(residual(&a, &e) < 1e-15);
    }

    #[test]
    fn pauli_y_complex_phase() {
        let mut a = ComplexMatrix::zeros(2, 2);
        a[(0, 1)] = c(0.0, -1.0);
        a[(1, 0)] = c(0.0, 1.0);
        let e = eig_hermitian(&a, false).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!(residual(&a, &e) < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian_unless_symmetrized() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(
            eig_hermitian(&a, false),
            Err(Error::NonHermitian { .. })
        ));
        let e = eig_hermitian(&a, true).unwrap();
        assert!((e.eigenvalues[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_matrix() {
        let e = eig_hermitian(&ComplexMatrix::zeros(3, 3), false).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0; 3]);
    }

    #[test]
    fn degenerate_spectrum() {
        // I + |v><v| with v = (1, i, 1)/√3 has spectrum {1, 1, 2}
        let s = 1.0 / 3f64.sqrt();
        let v = [c(s, 0.0), c(0.0, s), c(s, 0.0)];
        let a = ComplexMatrix::identity(3)
            .add(&ComplexMatrix::outer(&v, &v))
            .unwrap();
        let e = eig_hermitian(&a, false).unwrap();
        for (got, want) in e.eigenvalues.iter().zip([1.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert!(residual(&a, &e) < 1e-14);
    }
}

#![allow(dead_code)]

use lkh_core::linalg::ComplexMatrix;
use lkh_core::rng::{complex_gaussian_vec, stream_rng};
use lkh_core::Complex64;

/// Dense complex Gaussian matrix.
pub fn gaussian(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    let data = complex_gaussian_vec(&mut stream_rng(seed, 0), rows * cols);
    ComplexMatrix::from_vec(rows, cols, data).unwrap()
}

/// Random Hermitian matrix (G + G†)/2.
pub fn hermitian(n: usize, seed: u64) -> ComplexMatrix {
    let g = gaussian(n, n, seed);
    g.add(&g.adjoint()).unwrap().scale(0.5)
}

/// Random positive definite matrix G G† + shift·I.
pub fn positive(n: usize, seed: u64, shift: f64) -> ComplexMatrix {
    let g = gaussian(n, n, seed);
    g.mul(&g.adjoint())
        .unwrap()
        .add(&ComplexMatrix::identity(n).scale(shift))
        .unwrap()
}

pub fn unit_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let v = complex_gaussian_vec(&mut stream_rng(seed, 1), n);
    let norm = lkh_core::linalg::vec_norm(&v);
    v.into_iter().map(|z| z / norm).collect()
}

/// Random unitary from the Gram–Schmidt orthonormalization of a Gaussian matrix.
pub fn unitary(n: usize, seed: u64) -> ComplexMatrix {
    let g = gaussian(n, n, seed);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.col(j);
        for q in &cols {
            let p = lkh_core::linalg::inner(q, &v);
            for (x, y) in v.iter_mut().zip(q) {
                *x -= p * y;
            }
        }
        let norm = lkh_core::linalg::vec_norm(&v);
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

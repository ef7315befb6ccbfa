//! Equality analysis for ρ₁⁻¹⊗σ₂₃ ≤ ρ₁₂⁻¹⊗σ₃.
//!
//! Equality is equivalent to X = Y⁻¹ on H₁⊗H₂⊗H₃ with
//! X = σ₃^{-1/2}σ₂₃σ₃^{-1/2} and Y = ρ₁^{-1/2}ρ₁₂ρ₁^{-1/2}. That would force
//! X = I⊗A⊗I and Y = I⊗B⊗I with unit-trace A, B and A = B⁻¹, which is
//! impossible once d₂ > 1 because Tr[B⁻¹]·Tr[B] ≥ d₂².

use super::{diagnostics, lkh_operator_gap, Diagnostics, LkhInstance};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, mat_fn, ComplexMatrix, MatFn};
use crate::states::RANK_TOL;
use crate::tensor::{embed, kron, partial_trace, MultiSystem, SubsystemSet};

/// Tr[B⁻¹]·Tr[B] for an invertible positive `b`.
pub fn inv_trace_product(b: &ComplexMatrix) -> Result<f64> {
    let inv = mat_fn(b, MatFn::Inverse)?;
    Ok(inv.trace()?.re * b.trace()?.re)
}

fn set(i: &[usize]) -> SubsystemSet {
    SubsystemSet::new(i.to_vec()).expect("static subsystem set")
}

/// Restricts σ₂₃ to H₂⊗supp(σ₃). Returns the compressed operator, the new
/// d₃ and the number of discarded kernel dimensions.
fn compress_sigma(
    sigma23: &ComplexMatrix,
    d2: usize,
    d3: usize,
) -> Result<(ComplexMatrix, usize, usize)> {
    let s23 = MultiSystem::new(vec![d2, d3])?;
    let sigma3 = partial_trace(sigma23, &s23, &set(&[0]))?;
    let e = eig_hermitian(&sigma3, true)?;
    let cut = RANK_TOL * e.max();
    let support: Vec<usize> = (0..d3).filter(|&j| e.eigenvalues[j] > cut).collect();
    let r = support.len();
    if r == d3 {
        return Ok((sigma23.clone(), d3, 0));
    }
    let v = ComplexMatrix::from_fn(d3, r, |i, k| e.eigenvectors[(i, support[k])]);
    let iv = kron(&ComplexMatrix::identity(d2), &v)?;
    let compressed = iv.adjoint().mul(sigma23)?.mul(&iv)?.hermitian_part()?;
    Ok((compressed, r, d3 - r))
}

/// Everything the no-equality argument touches, evaluated on `inst`.
///
/// Keys: `gap` (least eigenvalue of ρ₁₂⁻¹⊗σ₃ − ρ₁⁻¹⊗σ₂₃ after discarding
/// the kernel of σ₃), `trace2_x_dev` = ‖Tr₂X − I₃‖_F, `trace2_y_dev` =
/// ‖Tr₂Y − I₁‖_F, `xy_inverse_dev` = ‖I⊗X − Y⁻¹⊗I‖_F, `trace_a`, `trace_b`
/// for the middle factors A = Tr₃X / d₃ and B = Tr₁Y / d₁,
/// `inv_trace_product` = Tr[B⁻¹]·Tr[B], `kernel_discarded`, `d2`, and the
/// conditioning `min_eig_rho12`, `min_eig_sigma3`.
pub fn equality_gap_check(inst: &LkhInstance) -> Result<Diagnostics> {
    let [d1, d2, d3_full] = inst.dims();
    let (sigma23, d3, discarded) = compress_sigma(inst.sigma23.mat(), d2, d3_full)?;
    let dims = [d1, d2, d3];
    let s12 = MultiSystem::new(vec![d1, d2])?;
    let s23 = MultiSystem::new(vec![d2, d3])?;
    let s123 = MultiSystem::new(vec![d1, d2, d3])?;

    let rho12 = inst.rho12.mat();
    let rho1 = partial_trace(rho12, &s12, &set(&[1]))?;
    let sigma3 = partial_trace(&sigma23, &s23, &set(&[0]))?;
    let min12 = eig_hermitian(rho12, true)?.min();
    let min3 = eig_hermitian(&sigma3, true)?.min();
    if min12 <= 0.0 {
        return Err(Error::IllConditioned {
            min_eig: min12,
            threshold: 0.0,
        });
    }

    let gap = lkh_operator_gap(rho12, &sigma23, dims, 0.0)?.min_eig_gap;

    let s3 = kron(
        &ComplexMatrix::identity(d2),
        &mat_fn(&sigma3, MatFn::InverseSqrt)?,
    )?;
    let x = s3.mul(&sigma23)?.mul(&s3)?.hermitian_part()?;
    let r1 = kron(
        &mat_fn(&rho1, MatFn::InverseSqrt)?,
        &ComplexMatrix::identity(d2),
    )?;
    let y = r1.mul(rho12)?.mul(&r1)?.hermitian_part()?;

    let trace2_x_dev = partial_trace(&x, &s23, &set(&[0]))?
        .sub(&ComplexMatrix::identity(d3))?
        .frobenius_norm();
    let trace2_y_dev = partial_trace(&y, &s12, &set(&[1]))?
        .sub(&ComplexMatrix::identity(d1))?
        .frobenius_norm();
    let y_inv = mat_fn(&y, MatFn::Inverse)?;
    let xy_inverse_dev = embed(&x, &s123, &set(&[1, 2]))?
        .sub(&embed(&y_inv, &s123, &set(&[0, 1]))?)?
        .frobenius_norm();

    let a = partial_trace(&x, &s23, &set(&[1]))?.scale(1.0 / d3 as f64);
    let b = partial_trace(&y, &s12, &set(&[0]))?.scale(1.0 / d1 as f64);

    Ok(diagnostics([
        ("gap", gap),
        ("trace2_x_dev", trace2_x_dev),
        ("trace2_y_dev", trace2_y_dev),
        ("xy_inverse_dev", xy_inverse_dev),
        ("trace_a", a.trace()?.re),
        ("trace_b", b.trace()?.re),
        ("inv_trace_product", inv_trace_product(&b)?),
        ("kernel_discarded", discarded as f64),
        ("d2", d2 as f64),
        ("min_eig_rho12", min12),
        ("min_eig_sigma3", min3),
    ]))
}

use crate::entropy::{require_tripartite, ssa_gap, von_neumann};
use crate::error::Result;
use crate::linalg::{eig_hermitian, mat_fn, ComplexMatrix, MatFn, CONDITION_TOL};
use crate::states::{purify, DensityMatrix};
use crate::tensor::{embed, SubsystemSet};

/// Identity weight mixed into ρ₁₂₃ when a reduction is too close to singular
/// for its logarithm.
pub const LOG_MIXING: f64 = 1e-6;

fn well_conditioned(rho: &DensityMatrix) -> Result<bool> {
    let e = eig_hermitian(rho.mat(), false)?;
    Ok(e.min() > 0.0 && e.min() > CONDITION_TOL * e.max())
}

/// Returns `rho123` unchanged (η = 0) if ρ₁₂, ρ₂₃, ρ₁ and ρ₃ all admit a
/// logarithm, otherwise (1 − η)ρ₁₂₃ + η I/n with η = [`LOG_MIXING`].
pub fn regularize_for_log(rho123: &DensityMatrix) -> Result<(DensityMatrix, f64)> {
    require_tripartite(rho123)?;
    for keep in [&[0, 1][..], &[1, 2], &[0], &[2]] {
        if !well_conditioned(&rho123.marginal(keep)?)? {
            return Ok((rho123.mix_with_identity(LOG_MIXING), LOG_MIXING));
        }
    }
    Ok((rho123.clone(), 0.0))
}

/// −Tr[ρ₁₂₃ (log ρ₁₂ + log ρ₂₃ − log ρ₁ − log ρ₃)], each log embedded on
/// H₁⊗H₂⊗H₃. Rank-deficient inputs are first regularized by
/// [`regularize_for_log`].
pub fn lkh3_from_trace(rho123: &DensityMatrix) -> Result<f64> {
    let (rho, _) = regularize_for_log(rho123)?;
    let sys = rho.sys().clone();
    let n = rho.dim();
    let mut op = ComplexMatrix::zeros(n, n);
    for (keep, sign) in [
        (&[0, 1][..], 1.0),
        (&[1, 2], 1.0),
        (&[0], -1.0),
        (&[2], -1.0),
    ] {
        let log = mat_fn(rho.marginal(keep)?.mat(), MatFn::Log)?;
        let at = SubsystemSet::new(keep.to_vec())?;
        op = op.add(&embed(&log, &sys, &at)?.scale(sign))?;
    }
    Ok(-rho.mat().mul(&op)?.trace()?.re)
}

/// SSA gap computed directly, and S(ρ₁₂) + S(ρ₁₄) − S(ρ₄) − S(ρ₂) on a
/// purification ρ₁₂₃₄ whose ancilla dimension is the rank of ρ₁₂₃.
pub fn reduce_ssa_to_lkh3(rho123: &DensityMatrix) -> Result<(f64, f64)> {
    require_tripartite(rho123)?;
    let direct = ssa_gap(rho123)?;
    let psi = purify(rho123, rho123.numerical_rank()?)?;
    let s = |keep: &[usize]| -> Result<f64> { Ok(von_neumann(&psi.reduced(keep)?)?.value) };
    let via = s(&[0, 1])? + s(&[0, 3])? - s(&[3])? - s(&[1])?;
    Ok((direct, via))
}

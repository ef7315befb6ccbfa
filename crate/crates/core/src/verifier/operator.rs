use super::{diagnostics, GapReport};
use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, loewner_leq, mat_fn, max_eigenvalue, min_eigenvalue, ComplexMatrix, MatFn,
};
use crate::states::{
    random_density_with, random_invertible_density, DensityMatrix, INVERTIBILITY_FLOOR, RANK_TOL,
};
use crate::tensor::{embed, kron, partial_trace, MultiSystem, SubsystemSet};
use rand::Rng;

/// A pair (ρ₁₂, σ₂₃) sharing the middle factor H₂.
#[derive(Debug, Clone, PartialEq)]
pub struct LkhInstance {
    pub rho12: DensityMatrix,
    pub sigma23: DensityMatrix,
}

impl LkhInstance {
    pub fn new(rho12: DensityMatrix, sigma23: DensityMatrix) -> Result<Self> {
        let (a, b) = (rho12.sys().dims(), sigma23.sys().dims());
        if a.len() != 2 || b.len() != 2 || a[1] != b[0] {
            return Err(Error::InvalidArgument(format!(
                "expected ρ on (d1,d2) and σ on (d2,d3), got {a:?} and {b:?}"
            )));
        }
        Ok(Self { rho12, sigma23 })
    }

    /// Random instance on `dims = [d1, d2, d3]`. ρ₁₂ passes the
    /// invertibility filter; σ₂₃ does too when `invertible_sigma` is set and
    /// otherwise has a uniformly drawn rank.
    pub fn random<R: Rng + ?Sized>(
        dims: [usize; 3],
        rng: &mut R,
        invertible_sigma: bool,
    ) -> Result<Self> {
        let s12 = MultiSystem::new(vec![dims[0], dims[1]])?;
        let s23 = MultiSystem::new(vec![dims[1], dims[2]])?;
        let rho12 = random_invertible_density(&s12, rng)?;
        let sigma23 = if invertible_sigma {
            random_invertible_density(&s23, rng)?
        } else {
            let n = s23.total_dim();
            let rank = rng.random_range(1..=n);
            random_density_with(&s23, rank, rng)?
        };
        Self::new(rho12, sigma23)
    }

    pub fn dims(&self) -> [usize; 3] {
        let a = self.rho12.sys().dims();
        let b = self.sigma23.sys().dims();
        [a[0], a[1], b[1]]
    }

    pub fn rho1(&self) -> Result<DensityMatrix> {
        self.rho12.marginal(&[0])
    }

    pub fn sigma3(&self) -> Result<DensityMatrix> {
        self.sigma23.marginal(&[1])
    }
}

fn sys3(d: [usize; 3]) -> Result<MultiSystem> {
    MultiSystem::new(d.to_vec())
}

fn set(i: &[usize]) -> SubsystemSet {
    SubsystemSet::new(i.to_vec()).expect("static subsystem set")
}

fn condition_number(a: &ComplexMatrix) -> Result<f64> {
    let e = eig_hermitian(a, false)?;
    Ok(e.max() / e.min())
}

/// ρ₁₂⁻¹⊗σ₃ − ρ₁⁻¹⊗σ₂₃ for positive operators `x` on (d1,d2) and `y` on
/// (d2,d3); neither needs unit trace. Each tensor product is assembled as a
/// product of commuting embeddings.
pub fn lkh_difference(
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    dims: [usize; 3],
) -> Result<ComplexMatrix> {
    let [d1, d2, d3] = dims;
    let s12 = MultiSystem::new(vec![d1, d2])?;
    let s23 = MultiSystem::new(vec![d2, d3])?;
    let s123 = sys3(dims)?;
    let x1 = partial_trace(x, &s12, &set(&[1]))?;
    let y3 = partial_trace(y, &s23, &set(&[0]))?;
    let x_inv = mat_fn(x, MatFn::Inverse)?;
    let x1_inv = mat_fn(&x1, MatFn::Inverse)?;
    let right = embed(&x_inv, &s123, &set(&[0, 1]))?.mul(&embed(&y3, &s123, &set(&[2]))?)?;
    let left = embed(&x1_inv, &s123, &set(&[0]))?.mul(&embed(y, &s123, &set(&[1, 2]))?)?;
    right.sub(&left)?.hermitian_part()
}

/// Loewner check of ρ₁⁻¹⊗σ₂₃ ≤ ρ₁₂⁻¹⊗σ₃ on positive operators, with the
/// verdict tolerance `tol · max(1, ‖difference‖_F)`.
pub fn lkh_operator_gap(
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    dims: [usize; 3],
    tol: f64,
) -> Result<GapReport> {
    let diff = lkh_difference(x, y, dims)?;
    let zero = ComplexMatrix::zeros(diff.rows(), diff.cols());
    let (_, gap) = loewner_leq(&zero, &diff, tol)?;
    let rel = tol * diff.frobenius_norm().max(1.0);
    Ok(GapReport::new(
        gap,
        rel,
        diagnostics([
            ("dim", (dims[0] * dims[1] * dims[2]) as f64),
            ("difference_norm", diff.frobenius_norm()),
        ]),
    ))
}

/// ρ₁⁻¹⊗σ₂₃ ≤ ρ₁₂⁻¹⊗σ₃ for a density-matrix instance.
///
/// ρ₁₂ must clear the invertibility floor `INVERTIBILITY_FLOOR / (d1 d2)`.
pub fn check_lkh_operator(inst: &LkhInstance, tol: f64) -> Result<GapReport> {
    let dims = inst.dims();
    let floor = INVERTIBILITY_FLOOR / (dims[0] * dims[1]) as f64;
    let min12 = inst.rho12.min_eigenvalue()?;
    if min12 < floor {
        return Err(Error::IllConditioned {
            min_eig: min12,
            threshold: floor,
        });
    }
    let mut report = lkh_operator_gap(inst.rho12.mat(), inst.sigma23.mat(), dims, tol)?;
    let d = &mut report.diagnostics;
    d.insert("min_eig_rho12".into(), min12);
    d.insert("cond_rho12".into(), condition_number(inst.rho12.mat())?);
    d.insert("cond_rho1".into(), condition_number(inst.rho1()?.mat())?);
    d.insert("min_eig_sigma3".into(), inst.sigma3()?.min_eigenvalue()?);
    Ok(report)
}

/// log ρ₁₂ + log σ₂₃ − log ρ₁ − log σ₃ ≤ 0.
///
/// The gap is minus the largest eigenvalue; the verdict allows `tol`
/// absolutely.
pub fn check_lkh_log(inst: &LkhInstance, tol: f64) -> Result<GapReport> {
    let dims = inst.dims();
    let s123 = sys3(dims)?;
    let logs = [
        (mat_fn(inst.rho12.mat(), MatFn::Log)?, set(&[0, 1]), 1.0),
        (mat_fn(inst.sigma23.mat(), MatFn::Log)?, set(&[1, 2]), 1.0),
        (mat_fn(inst.rho1()?.mat(), MatFn::Log)?, set(&[0]), -1.0),
        (mat_fn(inst.sigma3()?.mat(), MatFn::Log)?, set(&[2]), -1.0),
    ];
    let n = s123.total_dim();
    let mut op = ComplexMatrix::zeros(n, n);
    for (l, at, sign) in &logs {
        op = op.add(&embed(l, &s123, at)?.scale(*sign))?;
    }
    let op = op.hermitian_part()?;
    let top = max_eigenvalue(&op)?;
    Ok(GapReport::new(
        -top,
        tol,
        diagnostics([
            ("max_eig", top),
            ("operator_norm", op.frobenius_norm()),
            ("dim", n as f64),
        ]),
    ))
}

/// Compare the difference operator of a mixed σ₂₃ with the weighted sum of
/// the differences for the pure states of its eigen-ensemble.
///
/// The report's gap is minus the largest entrywise deviation, so the
/// verdict reads "deviation ≤ tol · max(1, largest entry)". The
/// mixed-instance Loewner gap and the smallest pure-instance gap are in the
/// diagnostics.
pub fn pure_to_mixed_extension_check(
    sigma23_mixed: &DensityMatrix,
    rho12: &DensityMatrix,
    tol: f64,
) -> Result<GapReport> {
    let inst = LkhInstance::new(rho12.clone(), sigma23_mixed.clone())?;
    let dims = inst.dims();
    let mixed = lkh_difference(rho12.mat(), sigma23_mixed.mat(), dims)?;
    let e = sigma23_mixed.eigen()?;
    let floor = RANK_TOL * e.max();
    let mut recombined = ComplexMatrix::zeros(mixed.rows(), mixed.cols());
    let mut min_pure_gap = f64::INFINITY;
    let mut members = 0usize;
    for j in 0..e.dim() {
        let w = e.eigenvalues[j];
        if w <= floor {
            continue;
        }
        let v = e.vector(j);
        let pure = ComplexMatrix::outer(&v, &v);
        let d = lkh_difference(rho12.mat(), &pure, dims)?;
        min_pure_gap = min_pure_gap.min(min_eigenvalue(&d)?);
        recombined = recombined.add(&d.scale(w))?;
        members += 1;
    }
    let deviation = mixed.max_abs_diff(&recombined)?;
    Ok(GapReport::new(
        -deviation,
        tol * mixed.max_abs().max(1.0),
        diagnostics([
            ("max_entry_deviation", deviation),
            ("ensemble_size", members as f64),
            ("mixed_gap", min_eigenvalue(&mixed)?),
            ("min_pure_gap", min_pure_gap),
        ]),
    ))
}

/// (x / Tr x, Tr x) for a positive operator `x`.
pub fn normalize_positive(x: &ComplexMatrix, sys: &MultiSystem) -> Result<(DensityMatrix, f64)> {
    let tr = x.trace()?;
    if !(tr.re > 0.0) || tr.im.abs() > 1e-12 * tr.re {
        return Err(Error::InvalidArgument(format!(
            "positive operator must have positive trace, got {tr}"
        )));
    }
    let rho = DensityMatrix::new(x.scale(1.0 / tr.re), sys.clone())?;
    Ok((rho, tr.re))
}

/// ρ₁₂(ε) on H₁⊗H̃₂ with H₂ ⊂ H̃₂ the span of the first d₂ basis vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedOperator {
    pub mat: ComplexMatrix,
    pub sys: MultiSystem,
}

/// Isometry H₂ → H̃₂ onto the first `d2` coordinates.
fn inclusion(d2: usize, d2_tilde: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d2_tilde, d2, |i, j| {
        crate::linalg::c(if i == j { 1.0 } else { 0.0 }, 0.0)
    })
}

/// ρ₁₂ + ε·id₁⊗P on H₁⊗H̃₂ where P projects onto the orthogonal complement
/// of H₂ in H̃₂. Invertible whenever ρ₁₂ is.
pub fn embed_and_regularize(
    rho12: &DensityMatrix,
    d2_tilde: usize,
    epsilon: f64,
) -> Result<RegularizedOperator> {
    let dims = rho12.sys().dims();
    if dims.len() != 2 {
        return Err(Error::InvalidArgument("expected a bipartite ρ₁₂".into()));
    }
    let (d1, d2) = (dims[0], dims[1]);
    if d2_tilde <= d2 {
        return Err(Error::InvalidArgument(format!(
            "enlarged dimension {d2_tilde} must exceed {d2}"
        )));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let v = inclusion(d2, d2_tilde);
    let w = kron(&ComplexMatrix::identity(d1), &v)?;
    let block = w.mul(rho12.mat())?.mul(&w.adjoint())?;
    let complement = ComplexMatrix::identity(d2_tilde).sub(&v.mul(&v.adjoint())?)?;
    let reg = kron(&ComplexMatrix::identity(d1), &complement)?.scale(epsilon);
    Ok(RegularizedOperator {
        mat: block.add(&reg)?,
        sys: MultiSystem::new(vec![d1, d2_tilde])?,
    })
}

/// Enlarge H₂ to dimension `d2_tilde`, regularize ρ₁₂ by `epsilon`, build
/// the difference operator on H₁⊗H̃₂⊗H₃ and restrict it to H₁⊗H₂⊗H₃.
///
/// The gap is that of the restricted operator; the unrestricted gap is
/// reported as `enlarged_gap`.
pub fn regularized_restricted_gap(
    inst: &LkhInstance,
    d2_tilde: usize,
    epsilon: f64,
    tol: f64,
) -> Result<GapReport> {
    let [d1, d2, d3] = inst.dims();
    let reg = embed_and_regularize(&inst.rho12, d2_tilde, epsilon)?;
    let v = inclusion(d2, d2_tilde);
    let w23 = kron(&v, &ComplexMatrix::identity(d3))?;
    let sigma_big = w23.mul(inst.sigma23.mat())?.mul(&w23.adjoint())?;
    let big = lkh_difference(&reg.mat, &sigma_big, [d1, d2_tilde, d3])?;
    let w123 = kron(&ComplexMatrix::identity(d1), &w23)?;
    let restricted = w123.adjoint().mul(&big)?.mul(&w123)?.hermitian_part()?;
    let gap = min_eigenvalue(&restricted)?;
    let rel = tol * restricted.frobenius_norm().max(1.0);
    Ok(GapReport::new(
        gap,
        rel,
        diagnostics([
            ("epsilon", epsilon),
            ("d2_tilde", d2_tilde as f64),
            ("enlarged_gap", min_eigenvalue(&big)?),
        ]),
    ))
}

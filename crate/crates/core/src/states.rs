//! Density matrices, state vectors, random instances, Schmidt decomposition
//! and purification.

use num_complex::Complex64;
use rand::Rng;

use crate::entropy::von_neumann;
use crate::error::{Error, Result};
use crate::linalg::{c, eig_hermitian, inner, vec_norm, ComplexMatrix, HermitianEigen};
use crate::rng::{complex_gaussian_vec, stream_rng};
use crate::tensor::{kron, kron_vec, partial_trace, permute_vector, MultiSystem, SubsystemSet};

/// Eigenvalues at or below `RANK_TOL * λ_max` count as zero.
pub const RANK_TOL: f64 = 1e-12;
/// An "invertible" random state has min eigenvalue at least this over n.
pub const INVERTIBILITY_FLOOR: f64 = 1e-6;
/// Regeneration budget for the invertibility filter.
pub const MAX_ATTEMPTS: usize = 100;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-11;
const UNIT_TOL: f64 = 1e-12;

/// Positive semidefinite, unit-trace operator tagged with its tensor
/// structure.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    sys: MultiSystem,
}

impl DensityMatrix {
    /// Validate and wrap. The stored matrix is the Hermitian part of `mat`.
    pub fn new(mat: ComplexMatrix, sys: MultiSystem) -> Result<Self> {
        let n = mat.require_square()?;
        sys.require_dim(n)?;
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let dev = mat.hermitian_deviation()?;
        if dev > HERMITIAN_TOL * mat.frobenius_norm() {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {dev:e})"
            )));
        }
        let tr = mat.trace()?;
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let mat = mat.hermitian_part()?;
        let min = eig_hermitian(&mat, false)?.min();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (min eigenvalue {min:e})"
            )));
        }
        Ok(Self { mat, sys })
    }

    /// Wrap a matrix that is a density matrix by construction.
    pub(crate) fn from_trusted(mat: ComplexMatrix, sys: MultiSystem) -> Self {
        let mat = mat
            .hermitian_part()
            .expect("trusted density matrix is square");
        Self { mat, sys }
    }

    /// I/n on `sys`.
    pub fn maximally_mixed(sys: &MultiSystem) -> Self {
        let n = sys.total_dim();
        Self::from_trusted(
            ComplexMatrix::identity(n).scale(1.0 / n as f64),
            sys.clone(),
        )
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probs: &[f64], sys: MultiSystem) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diag(probs), sys)
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn sys(&self) -> &MultiSystem {
        &self.sys
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn into_parts(self) -> (ComplexMatrix, MultiSystem) {
        (self.mat, self.sys)
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        eig_hermitian(&self.mat, false)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigen()?.min())
    }

    /// Number of eigenvalues above `RANK_TOL * λ_max`.
    pub fn numerical_rank(&self) -> Result<usize> {
        let e = self.eigen()?;
        let floor = RANK_TOL * e.max();
        Ok(e.eigenvalues.iter().filter(|&&l| l > floor).count())
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        self.mat.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Reduced state after tracing out `out`.
    pub fn partial_trace(&self, out: &SubsystemSet) -> Result<DensityMatrix> {
        let keep = out.complement(&self.sys)?;
        let mat = partial_trace(&self.mat, &self.sys, out)?;
        Ok(Self::from_trusted(mat, self.sys.select(&keep)))
    }

    /// Reduced state on the subsystems `keep` (ascending).
    pub fn marginal(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = SubsystemSet::new(keep.to_vec())?;
        let traced: Vec<usize> = keep.complement(&self.sys)?;
        self.partial_trace(&SubsystemSet::new(traced)?)
    }

    /// ρ ⊗ σ.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let mat = kron(&self.mat, &other.mat)?;
        Ok(Self::from_trusted(mat, self.sys.join(&other.sys)?))
    }

    /// (1 − η)ρ + η I/n.
    pub fn mix_with_identity(&self, eta: f64) -> DensityMatrix {
        let n = self.dim();
        let id = ComplexMatrix::identity(n).scale(eta / n as f64);
        let mat = self.mat.scale(1.0 - eta).add(&id).expect("same shape");
        Self::from_trusted(mat, self.sys.clone())
    }

    /// Convex combination Σ pᵢ ρᵢ of states on the same system.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let mut acc = ComplexMatrix::zeros(first.dim(), first.dim());
        for (p, rho) in parts {
            if rho.sys != first.sys {
                return Err(Error::InvalidArgument(
                    "mixture of different systems".into(),
                ));
            }
            acc = acc.add(&rho.mat.scale(*p))?;
        }
        Self::new(acc, first.sys.clone())
    }
}

/// Unit vector tagged with its tensor structure.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    vec: Vec<Complex64>,
    sys: MultiSystem,
}

impl StateVector {
    pub fn new(vec: Vec<Complex64>, sys: MultiSystem) -> Result<Self> {
        sys.require_dim(vec.len())?;
        let norm = vec_norm(&vec);
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidState(format!("vector norm {norm} is not 1")));
        }
        Ok(Self { vec, sys })
    }

    /// Normalize `vec` and wrap it.
    pub fn normalized(vec: Vec<Complex64>, sys: MultiSystem) -> Result<Self> {
        sys.require_dim(vec.len())?;
        let norm = vec_norm(&vec);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        let vec = vec.into_iter().map(|z| z / norm).collect();
        Ok(Self { vec, sys })
    }

    /// Basis vector |index⟩.
    pub fn basis(index: usize, sys: MultiSystem) -> Result<Self> {
        let n = sys.total_dim();
        if index >= n {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} >= {n}"
            )));
        }
        let mut vec = vec![c(0.0, 0.0); n];
        vec[index] = c(1.0, 0.0);
        Ok(Self { vec, sys })
    }

    /// u ⊗ v.
    pub fn product(&self, other: &StateVector) -> Result<StateVector> {
        Ok(Self {
            vec: kron_vec(&self.vec, &other.vec),
            sys: self.sys.join(&other.sys)?,
        })
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.vec
    }

    pub fn sys(&self) -> &MultiSystem {
        &self.sys
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        inner(&self.vec, &other.vec)
    }

    /// |ψ⟩⟨ψ|.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.vec, &self.vec)
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(self.projector(), self.sys.clone())
    }

    /// Coefficient matrix C with φ = Σ C_ab e_a ⊗ f_b, rows indexing the
    /// factors `rows` (in that order) and columns the remaining factors.
    pub fn coefficient_matrix(&self, rows: &[usize]) -> Result<ComplexMatrix> {
        let rows_set = SubsystemSet::new(rows.to_vec())?;
        let cols = rows_set.complement(&self.sys)?;
        let order: Vec<usize> = rows.iter().chain(&cols).copied().collect();
        let (v, _) = permute_vector(&self.vec, &self.sys, &order)?;
        ComplexMatrix::from_vec(self.sys.dim_of(rows), self.sys.dim_of(&cols), v)
    }

    /// Reduced state on `keep`, computed as C C† from the coefficient matrix
    /// rather than by tracing the full projector.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        let cm = self.coefficient_matrix(&keep)?;
        let rho = cm.mul(&cm.adjoint())?;
        Ok(DensityMatrix::from_trusted(rho, self.sys.select(&keep)))
    }
}

/// Bi-orthogonal decomposition φ = Σ_j λ_j^{1/2} u_j ⊗ v_j, coefficients in
/// descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtDecomposition {
    pub coeffs: Vec<f64>,
    pub left: Vec<Vec<Complex64>>,
    pub right: Vec<Vec<Complex64>>,
    pub left_sys: MultiSystem,
    pub right_sys: MultiSystem,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    /// Σ_j λ_j^{1/2} u_j ⊗ v_j as a flat vector.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let n = self.left_sys.total_dim() * self.right_sys.total_dim();
        let mut out = vec![c(0.0, 0.0); n];
        for ((&l, u), v) in self.coeffs.iter().zip(&self.left).zip(&self.right) {
            let s = l.sqrt();
            for (o, x) in out.iter_mut().zip(kron_vec(u, v)) {
                *o += x * s;
            }
        }
        out
    }
}

fn split_at_cut(sys: &MultiSystem, cut: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    if cut == 0 || cut >= sys.len() {
        return Err(Error::InvalidArgument(format!(
            "cut {cut} must lie strictly inside 0..{}",
            sys.len()
        )));
    }
    Ok(((0..cut).collect(), (cut..sys.len()).collect()))
}

/// Schmidt decomposition across the cut between factors `cut − 1` and `cut`.
///
/// The left vectors and coefficients come from the eigendecomposition of
/// C C†; each right vector is v_j = Cᵀ ū_j / λ_j^{1/2}.
pub fn schmidt_decompose(phi: &StateVector, cut: usize) -> Result<SchmidtDecomposition> {
    let (left_idx, right_idx) = split_at_cut(phi.sys(), cut)?;
    let cm = phi.coefficient_matrix(&left_idx)?;
    let e = eig_hermitian(&cm.mul(&cm.adjoint())?, true)?;
    let lmax = e.max();
    if !(lmax > 0.0) {
        return Err(Error::InvalidState("degenerate normalization".into()));
    }
    let floor = RANK_TOL * lmax;
    let ct = cm.transpose();
    let mut coeffs = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for j in (0..e.dim()).rev() {
        let l = e.eigenvalues[j];
        if l <= floor {
            break;
        }
        let u = e.vector(j);
        let u_bar: Vec<Complex64> = u.iter().map(|z| z.conj()).collect();
        let s = l.sqrt();
        let v = ct.apply(&u_bar)?.into_iter().map(|z| z / s).collect();
        coeffs.push(l);
        left.push(u);
        right.push(v);
    }
    Ok(SchmidtDecomposition {
        coeffs,
        left,
        right,
        left_sys: phi.sys().select(&left_idx),
        right_sys: phi.sys().select(&right_idx),
    })
}

fn nonzero_spectrum(rho: &ComplexMatrix) -> Result<Vec<f64>> {
    let e = eig_hermitian(rho, true)?;
    let floor = RANK_TOL * e.max();
    Ok(e.eigenvalues
        .iter()
        .rev()
        .copied()
        .filter(|&l| l > floor)
        .collect())
}

/// Nonzero spectra (descending) of the two reduced states of |φ⟩⟨φ| across
/// `cut`, each obtained by an explicit partial trace of the projector.
pub fn reduced_spectra_equal(phi: &StateVector, cut: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let (left_idx, right_idx) = split_at_cut(phi.sys(), cut)?;
    let proj = phi.projector();
    let rho_left = partial_trace(&proj, phi.sys(), &SubsystemSet::new(right_idx)?)?;
    let rho_right = partial_trace(&proj, phi.sys(), &SubsystemSet::new(left_idx)?)?;
    Ok((nonzero_spectrum(&rho_left)?, nonzero_spectrum(&rho_right)?))
}

/// Purification Ψ = Σ_j λ_j^{1/2} u_j ⊗ e_j on `rho.sys ⊗ C^{ancilla_dim}`.
pub fn purify(rho: &DensityMatrix, ancilla_dim: usize) -> Result<StateVector> {
    let e = rho.eigen()?;
    let floor = RANK_TOL * e.max();
    let support: Vec<usize> = (0..e.dim())
        .rev()
        .filter(|&j| e.eigenvalues[j] > floor)
        .collect();
    if ancilla_dim < support.len() || ancilla_dim == 0 {
        return Err(Error::AncillaTooSmall {
            ancilla: ancilla_dim,
            rank: support.len(),
        });
    }
    let n = rho.dim();
    let mut psi = vec![c(0.0, 0.0); n * ancilla_dim];
    for (slot, &j) in support.iter().enumerate() {
        let s = e.eigenvalues[j].sqrt();
        for a in 0..n {
            psi[a * ancilla_dim + slot] = e.eigenvectors[(a, j)] * s;
        }
    }
    let sys = rho.sys().join(&MultiSystem::new(vec![ancilla_dim])?)?;
    StateVector::normalized(psi, sys)
}

/// Entropies S(ρ₁₂₃), S(ρ₄), S(ρ₂₃), S(ρ₁₄) where ρ₁₂₃₄ is a purification of
/// `rho123` with ancilla dimension equal to its rank. S(ρ₁₂₃) and S(ρ₂₃) are
/// computed from `rho123` directly, the other two from the purification.
pub fn entropy_of_purification_identities(rho123: &DensityMatrix) -> Result<(f64, f64, f64, f64)> {
    if rho123.sys().len() != 3 {
        return Err(Error::InvalidArgument("expected a tripartite state".into()));
    }
    let rank = rho123.numerical_rank()?;
    let psi = purify(rho123, rank)?;
    let s123 = von_neumann(rho123)?.value;
    let s23 = von_neumann(&rho123.marginal(&[1, 2])?)?.value;
    let s4 = von_neumann(&psi.reduced(&[3])?)?.value;
    let s14 = von_neumann(&psi.reduced(&[0, 3])?)?.value;
    Ok((s123, s4, s23, s14))
}

/// ρ = G G† / Tr(G G†) with G an n×rank complex Ginibre matrix.
pub fn random_density_with<R: Rng + ?Sized>(
    sys: &MultiSystem,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let n = sys.total_dim();
    if rank == 0 || rank > n {
        return Err(Error::RankOutOfRange { rank, dim: n });
    }
    let g = ComplexMatrix::from_vec(n, rank, complex_gaussian_vec(rng, n * rank))?;
    let gg = g.mul(&g.adjoint())?;
    let tr = gg.trace()?.re;
    Ok(DensityMatrix::from_trusted(gg.scale(1.0 / tr), sys.clone()))
}

/// [`random_density_with`] on stream 0 of `seed`.
pub fn random_density(sys: &MultiSystem, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(sys, rank, &mut stream_rng(seed, 0))
}

/// Full-rank random state with min eigenvalue ≥ `INVERTIBILITY_FLOOR / n`,
/// redrawing from `rng` up to `MAX_ATTEMPTS` times.
pub fn random_invertible_density<R: Rng + ?Sized>(
    sys: &MultiSystem,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let n = sys.total_dim();
    let floor = INVERTIBILITY_FLOOR / n as f64;
    let mut last = 0.0;
    for _ in 0..MAX_ATTEMPTS {
        let rho = random_density_with(sys, n, rng)?;
        last = rho.min_eigenvalue()?;
        if last >= floor {
            return Ok(rho);
        }
    }
    Err(Error::IllConditioned {
        min_eig: last,
        threshold: floor,
    })
}

pub fn random_pure_with<R: Rng + ?Sized>(sys: &MultiSystem, rng: &mut R) -> Result<StateVector> {
    StateVector::normalized(complex_gaussian_vec(rng, sys.total_dim()), sys.clone())
}

/// Normalized complex Gaussian vector on stream 0 of `seed`.
pub fn random_pure(sys: &MultiSystem, seed: u64) -> Result<StateVector> {
    random_pure_with(sys, &mut stream_rng(seed, 0))
}

//! Tensor-product structure on dense operators.
//!
//! Composite indices are row-major: subsystem 0 varies slowest, matching the
//! left-to-right factor order of [`kron`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, check_dimension, ComplexMatrix};

/// Ordered subsystem dimensions (d₀, …, d_{k−1}).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiSystem {
    dims: Vec<usize>,
}

impl MultiSystem {
    /// An empty dimension list describes the trivial one-dimensional system.
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "subsystem dimensions must be positive: {dims:?}"
            )));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidArgument("dimension product overflows".into()))?;
        check_dimension(total)?;
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Product of dimensions over `positions`.
    pub fn dim_of(&self, positions: &[usize]) -> usize {
        positions.iter().map(|&i| self.dims[i]).product()
    }

    /// The subsystem obtained by keeping `positions` in the given order.
    pub fn select(&self, positions: &[usize]) -> MultiSystem {
        MultiSystem {
            dims: positions.iter().map(|&i| self.dims[i]).collect(),
        }
    }

    /// Concatenation `self ⊗ other`.
    pub fn join(&self, other: &MultiSystem) -> Result<MultiSystem> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        MultiSystem::new(dims)
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    pub(crate) fn require_dim(&self, n: usize) -> Result<()> {
        if self.total_dim() != n {
            return Err(Error::ShapeMismatch {
                op: "multisystem",
                left: (n, n),
                right: (self.total_dim(), self.total_dim()),
            });
        }
        Ok(())
    }
}

/// A set of subsystem positions, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemSet {
    indices: Vec<usize>,
}

impl SubsystemSet {
    pub fn new(indices: impl Into<Vec<usize>>) -> Result<Self> {
        let mut indices = indices.into();
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSubsystems(format!(
                "duplicate index in {indices:?}"
            )));
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Validate against `sys` and return the complementary positions.
    pub fn complement(&self, sys: &MultiSystem) -> Result<Vec<usize>> {
        if let Some(&bad) = self.indices.iter().find(|&&i| i >= sys.len()) {
            return Err(Error::InvalidSubsystems(format!(
                "index {bad} out of range for {} subsystems",
                sys.len()
            )));
        }
        Ok((0..sys.len()).filter(|&i| !self.contains(i)).collect())
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    check_dimension(ar * br)?;
    check_dimension(ac * bc)?;
    Ok(ComplexMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    }))
}

/// Kronecker product of state vectors.
pub fn kron_vec(u: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    u.iter()
        .flat_map(|&x| v.iter().map(move |&y| x * y))
        .collect()
}

/// Offsets into the full composite index contributed by the digits of
/// `positions`, enumerated in row-major order over those positions.
fn offsets(sys: &MultiSystem, positions: &[usize]) -> Vec<usize> {
    let strides = sys.strides();
    let mut out = vec![0usize];
    for &p in positions {
        let d = sys.dims()[p];
        let s = strides[p];
        out = out
            .iter()
            .flat_map(|&base| (0..d).map(move |k| base + k * s))
            .collect();
    }
    out
}

/// Partial trace of `a` over the subsystems in `out`.
///
/// The result acts on the remaining factors in their original order.
pub fn partial_trace(
    a: &ComplexMatrix,
    sys: &MultiSystem,
    out: &SubsystemSet,
) -> Result<ComplexMatrix> {
    let n = a.require_square()?;
    sys.require_dim(n)?;
    let keep = out.complement(sys)?;
    let keep_off = offsets(sys, &keep);
    let trace_off = offsets(sys, out.indices());
    let m = keep_off.len();
    let mut result = ComplexMatrix::zeros(m, m);
    for (r, &ro) in keep_off.iter().enumerate() {
        for (cidx, &co) in keep_off.iter().enumerate() {
            let mut acc = c(0.0, 0.0);
            for &t in &trace_off {
                acc += a[(ro + t, co + t)];
            }
            result[(r, cidx)] = acc;
        }
    }
    Ok(result)
}

/// Source index of each position after reordering factors so that new
/// factor `i` is old factor `perm[i]`.
fn permutation_map(sys: &MultiSystem, perm: &[usize]) -> Result<Vec<usize>> {
    let k = sys.len();
    let mut seen = vec![false; k];
    if perm.len() != k {
        return Err(Error::InvalidPermutation(format!(
            "expected {k} entries, got {}",
            perm.len()
        )));
    }
    for &p in perm {
        if p >= k || seen[p] {
            return Err(Error::InvalidPermutation(format!("{perm:?}")));
        }
        seen[p] = true;
    }
    Ok(offsets(sys, perm))
}

/// Inverse of a permutation given as a list.
pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// Reorder tensor factors: factor `i` of the result is factor `perm[i]` of
/// `a`. Returns the operator together with its new system.
pub fn permute_systems(
    a: &ComplexMatrix,
    sys: &MultiSystem,
    perm: &[usize],
) -> Result<(ComplexMatrix, MultiSystem)> {
    let n = a.require_square()?;
    sys.require_dim(n)?;
    let src = permutation_map(sys, perm)?;
    let out = ComplexMatrix::from_fn(n, n, |i, j| a[(src[i], src[j])]);
    Ok((out, sys.select(perm)))
}

/// Reorder the tensor factors of a state vector, as [`permute_systems`].
pub fn permute_vector(
    v: &[Complex64],
    sys: &MultiSystem,
    perm: &[usize],
) -> Result<(Vec<Complex64>, MultiSystem)> {
    sys.require_dim(v.len())?;
    let src = permutation_map(sys, perm)?;
    Ok((src.iter().map(|&s| v[s]).collect(), sys.select(perm)))
}

/// `a` acting on the factors `at`, identity on all others.
///
/// `a` must act on the factors of `at` in ascending order. Non-contiguous
/// sets are handled by embedding on a leading block and permuting back.
pub fn embed(a: &ComplexMatrix, sys: &MultiSystem, at: &SubsystemSet) -> Result<ComplexMatrix> {
    let n = a.require_square()?;
    let rest = at.complement(sys)?;
    let at_idx = at.indices();
    if n != sys.dim_of(at_idx) {
        return Err(Error::ShapeMismatch {
            op: "embed",
            left: a.shape(),
            right: (sys.dim_of(at_idx), sys.dim_of(at_idx)),
        });
    }
    check_dimension(sys.total_dim())?;
    let contiguous = at_idx.windows(2).all(|w| w[1] == w[0] + 1);
    if contiguous {
        let first = at_idx.first().copied().unwrap_or(0);
        let before = sys.dim_of(&(0..first).collect::<Vec<_>>());
        let after = sys.total_dim() / (before * n);
        let left = kron(&ComplexMatrix::identity(before), a)?;
        return kron(&left, &ComplexMatrix::identity(after));
    }
    let order: Vec<usize> = at_idx.iter().chain(&rest).copied().collect();
    let staged = kron(a, &ComplexMatrix::identity(sys.dim_of(&rest)))?;
    let staged_sys = sys.select(&order);
    let (out, _) = permute_systems(&staged, &staged_sys, &inverse_permutation(&order))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(d: &[usize]) -> MultiSystem {
        MultiSystem::new(d.to_vec()).unwrap()
    }

    fn set(i: &[usize]) -> SubsystemSet {
        SubsystemSet::new(i.to_vec()).unwrap()
    }

    fn ramp(n: usize, seed: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |i, j| {
            c((i * n + j) as f64 + seed, (i as f64 - j as f64) * seed)
        })
    }

    #[test]
    fn kron_identities() {
        let k = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3)).unwrap();
        assert_eq!(k, ComplexMatrix::identity(6));
    }

    #[test]
    fn kron_fixes_index_convention() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 2.0]);
        let b = ComplexMatrix::from_real_diag(&[3.0, 4.0]);
        assert_eq!(
            kron(&a, &b).unwrap(),
            ComplexMatrix::from_real_diag(&[3.0, 4.0, 6.0, 8.0])
        );
    }

    #[test]
    fn kron_respects_dimension_cap() {
        let big = ComplexMatrix::identity(40);
        assert!(matches!(kron(&big, &big), Err(Error::DimensionCap { .. })));
    }

    #[test]
    fn partial_trace_of_product() {
        let a = ramp(2, 0.5);
        let b = ComplexMatrix::from_real_diag(&[0.25, 1.0, 2.0]);
        let ab = kron(&a, &b).unwrap();
        let r = partial_trace(&ab, &sys(&[2, 3]), &set(&[1])).unwrap();
        assert!(r.max_abs_diff(&a.scale(3.25)).unwrap() < 1e-14);
        let l = partial_trace(&ab, &sys(&[2, 3]), &set(&[0])).unwrap();
        let tr_a = a.trace().unwrap();
        assert!(l.max_abs_diff(&b.scale_complex(tr_a)).unwrap() < 1e-13);
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let s = 0.5f64.sqrt();
        let phi = [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        let rho = ComplexMatrix::outer(&phi, &phi);
        let r = partial_trace(&rho, &sys(&[2, 2]), &set(&[1])).unwrap();
        assert!(
            r.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5))
                .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn partial_trace_errors() {
        let a = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_trace(&a, &sys(&[2, 2]), &set(&[2])),
            Err(Error::InvalidSubsystems(_))
        ));
        assert!(matches!(
            partial_trace(&a, &sys(&[2, 3]), &set(&[0])),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(SubsystemSet::new(vec![1, 1]).is_err());
    }

    #[test]
    fn trace_out_everything() {
        let a = ramp(4, 1.0);
        let r = partial_trace(&a, &sys(&[2, 2]), &set(&[0, 1])).unwrap();
        assert_eq!(r.shape(), (1, 1));
        assert_eq!(r[(0, 0)], a.trace().unwrap());
    }

    #[test]
    fn permute_identity_and_swap() {
        let a = ramp(2, 0.3);
        let b = ramp(3, 0.7);
        let ab = kron(&a, &b).unwrap();
        let s = sys(&[2, 3]);
        let (same, same_sys) = permute_systems(&ab, &s, &[0, 1]).unwrap();
        assert_eq!(same, ab);
        assert_eq!(same_sys, s);
        let (swapped, swapped_sys) = permute_systems(&ab, &s, &[1, 0]).unwrap();
        assert_eq!(swapped, kron(&b, &a).unwrap());
        assert_eq!(swapped_sys.dims(), &[3, 2]);
        assert!(permute_systems(&ab, &s, &[0, 0]).is_err());
        assert!(permute_systems(&ab, &s, &[0]).is_err());
    }

    #[test]
    fn permute_is_exactly_invertible() {
        let s = sys(&[2, 3, 4]);
        let a = ramp(24, 0.1);
        let perm = [2, 0, 1];
        let (p, ps) = permute_systems(&a, &s, &perm).unwrap();
        let (back, back_sys) = permute_systems(&p, &ps, &inverse_permutation(&perm)).unwrap();
        assert_eq!(back, a);
        assert_eq!(back_sys, s);
    }

    #[test]
    fn embed_examples() {
        let s = sys(&[2, 3, 2]);
        let id = embed(&ComplexMatrix::identity(3), &s, &set(&[1])).unwrap();
        assert_eq!(id, ComplexMatrix::identity(12));

        let a = ramp(3, 0.4);
        let trivial = embed(&a, &sys(&[1, 3, 1]), &set(&[1])).unwrap();
        assert_eq!(trivial, a);

        let mid = embed(&a, &s, &set(&[1])).unwrap();
        let want = kron(
            &kron(&ComplexMatrix::identity(2), &a).unwrap(),
            &ComplexMatrix::identity(2),
        )
        .unwrap();
        assert_eq!(mid, want);
    }

    #[test]
    fn embed_non_contiguous_matches_direct_construction() {
        // a ⊗ b on factors {0, 2} of (2,3,2) equals a ⊗ I ⊗ b
        let a = ramp(2, 0.2);
        let b = ramp(2, 0.9);
        let s = sys(&[2, 3, 2]);
        let got = embed(&kron(&a, &b).unwrap(), &s, &set(&[0, 2])).unwrap();
        let want = kron(&kron(&a, &ComplexMatrix::identity(3)).unwrap(), &b).unwrap();
        assert!(got.max_abs_diff(&want).unwrap() < 1e-15);
    }

    #[test]
    fn traced_identity_scales_by_dimension() {
        // Tr₂₃[ρ₁₂ ⊗ I₃] = d₃ ρ₁
        let rho12 = ramp(6, 0.3);
        let s123 = sys(&[2, 3, 4]);
        let big = embed(&rho12, &s123, &set(&[0, 1])).unwrap();
        let lhs = partial_trace(&big, &s123, &set(&[1, 2])).unwrap();
        let rho1 = partial_trace(&rho12, &sys(&[2, 3]), &set(&[1])).unwrap();
        assert!(lhs.max_abs_diff(&rho1.scale(4.0)).unwrap() < 1e-12);
    }
}

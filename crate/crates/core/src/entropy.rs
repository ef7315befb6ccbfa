//! Von Neumann entropy (natural log) and the tripartite entropy gaps.

use crate::error::{Error, Result};
use crate::states::DensityMatrix;

/// Eigenvalues below this contribute nothing to the entropy.
pub const ENTROPY_CLAMP: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyReport {
    /// Entropy in nats.
    pub value: f64,
    /// Total |λ| of eigenvalues clamped to zero.
    pub clamped_mass: f64,
}

/// S(ρ) = −Σ λ ln λ.
pub fn von_neumann(rho: &DensityMatrix) -> Result<EntropyReport> {
    let e = rho.eigen()?;
    let mut value = 0.0;
    let mut clamped_mass = 0.0;
    for &l in &e.eigenvalues {
        if l < ENTROPY_CLAMP {
            clamped_mass += l.abs();
        } else {
            value -= l * l.ln();
        }
    }
    Ok(EntropyReport {
        value,
        clamped_mass,
    })
}

/// ln Tr ρ².
pub fn renyi2_log_purity(rho: &DensityMatrix) -> f64 {
    rho.purity().ln()
}

fn entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(von_neumann(rho)?.value)
}

/// Marginal entropies of a tripartite state, keyed by the kept subsystems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripartiteEntropies {
    pub s123: f64,
    pub s12: f64,
    pub s23: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl TripartiteEntropies {
    pub fn of(rho123: &DensityMatrix) -> Result<Self> {
        require_tripartite(rho123)?;
        let rho12 = rho123.marginal(&[0, 1])?;
        let rho23 = rho123.marginal(&[1, 2])?;
        Ok(Self {
            s123: entropy(rho123)?,
            s12: entropy(&rho12)?,
            s23: entropy(&rho23)?,
            s1: entropy(&rho12.marginal(&[0])?)?,
            s2: entropy(&rho12.marginal(&[1])?)?,
            s3: entropy(&rho23.marginal(&[1])?)?,
        })
    }

    pub fn ssa_gap(&self) -> f64 {
        self.s12 + self.s23 - self.s123 - self.s2
    }

    pub fn lkh3_gap(&self) -> f64 {
        self.s12 + self.s23 - self.s1 - self.s3
    }
}

pub(crate) fn require_tripartite(rho: &DensityMatrix) -> Result<()> {
    if rho.sys().len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "expected a tripartite state, got dims {:?}",
            rho.sys().dims()
        )));
    }
    Ok(())
}

/// S(ρ₁₂) + S(ρ₂₃) − S(ρ₁₂₃) − S(ρ₂).
pub fn ssa_gap(rho123: &DensityMatrix) -> Result<f64> {
    Ok(TripartiteEntropies::of(rho123)?.ssa_gap())
}

/// S(ρ₁₂) + S(ρ₂₃) − S(ρ₁) − S(ρ₃).
pub fn lkh3_gap(rho123: &DensityMatrix) -> Result<f64> {
    Ok(TripartiteEntropies::of(rho123)?.lkh3_gap())
}

/// S(ρ₁₂) + S(ρ₂₃) − S(ρ₁₂₃) − ln Tr ρ₂².
pub fn araki_lieb_weak_gap(rho123: &DensityMatrix) -> Result<f64> {
    let s = TripartiteEntropies::of(rho123)?;
    let rho2 = rho123.marginal(&[1])?;
    Ok(s.s12 + s.s23 - s.s123 - renyi2_log_purity(&rho2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::states::{random_density, StateVector};
    use crate::tensor::MultiSystem;
    use std::f64::consts::LN_2;

    fn sys(d: &[usize]) -> MultiSystem {
        MultiSystem::new(d.to_vec()).unwrap()
    }

    fn ghz() -> DensityMatrix {
        let s = 0.5f64.sqrt();
        let mut v = vec![c(0.0, 0.0); 8];
        v[0] = c(s, 0.0);
        v[7] = c(s, 0.0);
        StateVector::new(v, sys(&[2, 2, 2])).unwrap().density()
    }

    #[test]
    fn entropy_examples() {
        let pure = StateVector::basis(1, sys(&[3])).unwrap().density();
        assert_eq!(von_neumann(&pure).unwrap().value, 0.0);

        let mixed = DensityMatrix::maximally_mixed(&sys(&[5]));
        assert!((von_neumann(&mixed).unwrap().value - 5f64.ln()).abs() < 1e-14);

        let d = DensityMatrix::diagonal(&[0.5, 0.25, 0.25], sys(&[3])).unwrap();
        let s = von_neumann(&d).unwrap().value;
        assert!((s - 1.5 * LN_2).abs() < 1e-15);
        assert!((s - 1.0397).abs() < 1e-4);
    }

    #[test]
    fn clamped_mass_is_reported() {
        let d = DensityMatrix::diagonal(&[1.0, 0.0], sys(&[2])).unwrap();
        let r = von_neumann(&d).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.clamped_mass, 0.0);
    }

    #[test]
    fn renyi_examples() {
        let pure = StateVector::basis(0, sys(&[2])).unwrap().density();
        assert_eq!(renyi2_log_purity(&pure), 0.0);
        let mixed = DensityMatrix::maximally_mixed(&sys(&[4]));
        assert!((renyi2_log_purity(&mixed) + 4f64.ln()).abs() < 1e-15);
        let flat = DensityMatrix::maximally_mixed(&sys(&[2]));
        let vn = von_neumann(&flat).unwrap().value;
        assert!((renyi2_log_purity(&flat) + vn).abs() < 1e-15);
        assert!((renyi2_log_purity(&flat) + LN_2).abs() < 1e-15);
    }

    #[test]
    fn product_state_gaps_vanish() {
        let r1 = random_density(&sys(&[2]), 2, 1).unwrap();
        let r2 = random_density(&sys(&[3]), 3, 2).unwrap();
        let r3 = random_density(&sys(&[2]), 2, 3).unwrap();
        let rho = r1.tensor(&r2).unwrap().tensor(&r3).unwrap();
        assert!(ssa_gap(&rho).unwrap().abs() < 1e-9);
        assert!(lkh3_gap(&rho).unwrap() >= -1e-9);
    }

    #[test]
    fn ghz_closed_forms() {
        let g = ghz();
        assert!((ssa_gap(&g).unwrap() - LN_2).abs() < 1e-12);
        assert!(lkh3_gap(&g).unwrap().abs() < 1e-12);
    }

    #[test]
    fn pure_product_gaps() {
        let v = StateVector::basis(5, sys(&[2, 2, 2])).unwrap().density();
        assert_eq!(lkh3_gap(&v).unwrap(), 0.0);
        assert_eq!(araki_lieb_weak_gap(&v).unwrap(), 0.0);
    }

    #[test]
    fn araki_lieb_product_closed_form() {
        // ρ₂ = I/d gives weak gap S₂ − ln Tr ρ₂² = 2 ln d
        let r1 = random_density(&sys(&[2]), 2, 4).unwrap();
        let r2 = DensityMatrix::maximally_mixed(&sys(&[3]));
        let r3 = random_density(&sys(&[2]), 1, 5).unwrap();
        let rho = r1.tensor(&r2).unwrap().tensor(&r3).unwrap();
        let gap = araki_lieb_weak_gap(&rho).unwrap();
        assert!((gap - 2.0 * 3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_tripartite() {
        let rho = random_density(&sys(&[2, 2]), 4, 0).unwrap();
        assert!(matches!(ssa_gap(&rho), Err(Error::InvalidArgument(_))));
    }
}

//! The pure-state lemma: for unit vectors Ψ on H₁⊗H₂ and Φ on H₂⊗H₃ with
//! σ₃ = Tr₂|Φ⟩⟨Φ| invertible,
//!
//! ```text
//! A := |Ψ⟩⟨Ψ| ⊗ σ₃⁻¹  ≤  (1 + √ε) ρ₁ ⊗ X₂₃(ε)⁻¹ =: (1 + √ε) B,
//! X₂₃(ε) := |Φ⟩⟨Φ| + ε (I − |Φ⟩⟨Φ|)
//! ```
//!
//! for all small ε. Beyond the bound itself this module exposes the pieces
//! of its proof: the Gram matrix of the two Schmidt families, the diagonal
//! claim ⟨w₁⊗Φ, A w₁⊗Φ⟩ ≤ ⟨w₁, ρ₁ w₁⟩, and the δ-split estimate.

use num_complex::Complex64;
use rand::Rng;

use super::{diagnostics, Diagnostics, GapReport};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, inner, loewner_leq, mat_fn, ComplexMatrix, MatFn};
use crate::states::{
    random_pure_with, schmidt_decompose, StateVector, INVERTIBILITY_FLOOR, MAX_ATTEMPTS,
};
use crate::tensor::{kron, kron_vec, MultiSystem};

/// ε* = (μ / (2 d₂ d₃²))², inside the regime where the bound is proven.
pub fn epsilon_star(mu: f64, d2: usize, d3: usize) -> f64 {
    (mu / (2.0 * d2 as f64 * (d3 * d3) as f64)).powi(2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaInstance {
    pub psi: StateVector,
    pub phi: StateVector,
    pub epsilon: f64,
    mu: f64,
}

impl LemmaInstance {
    /// Requires Ψ on (d₁,d₂), Φ on (d₂,d₃), ε > 0, and the least eigenvalue μ
    /// of σ₃ above `INVERTIBILITY_FLOOR / d₃`.
    pub fn new(psi: StateVector, phi: StateVector, epsilon: f64) -> Result<Self> {
        let (a, b) = (psi.sys().dims(), phi.sys().dims());
        if a.len() != 2 || b.len() != 2 || a[1] != b[0] {
            return Err(Error::InvalidArgument(format!(
                "expected Ψ on (d1,d2) and Φ on (d2,d3), got {a:?} and {b:?}"
            )));
        }
        if !(epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        let d3 = b[1];
        let mu = phi.reduced(&[1])?.min_eigenvalue()?;
        let floor = INVERTIBILITY_FLOOR / d3 as f64;
        if mu <= floor {
            return Err(Error::IllConditioned {
                min_eig: mu,
                threshold: floor,
            });
        }
        Ok(Self {
            psi,
            phi,
            epsilon,
            mu,
        })
    }

    /// Random pure pair with σ₃ invertible; redraws Φ up to `MAX_ATTEMPTS`
    /// times. `epsilon = None` picks ε*/10.
    pub fn random<R: Rng + ?Sized>(
        dims: [usize; 3],
        rng: &mut R,
        epsilon: Option<f64>,
    ) -> Result<Self> {
        let [d1, d2, d3] = dims;
        if d2 < d3 {
            return Err(Error::InvalidArgument(format!(
                "σ₃ cannot be invertible when d2 = {d2} < d3 = {d3}"
            )));
        }
        let psi = random_pure_with(&MultiSystem::new(vec![d1, d2])?, rng)?;
        let s23 = MultiSystem::new(vec![d2, d3])?;
        let mut last = Error::InvalidArgument("no attempts".into());
        for _ in 0..MAX_ATTEMPTS {
            let phi = random_pure_with(&s23, rng)?;
            match Self::new(psi.clone(), phi, 1.0) {
                Ok(mut inst) => {
                    inst.epsilon = epsilon.unwrap_or(inst.epsilon_star() / 10.0);
                    if !(inst.epsilon > 0.0) {
                        return Err(Error::InvalidArgument("epsilon must be positive".into()));
                    }
                    return Ok(inst);
                }
                Err(e @ Error::IllConditioned { .. }) => last = e,
                Err(e) => return Err(e),
            }
        }
        Err(last)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.psi.clone(), self.phi.clone(), epsilon)
    }

    pub fn dims(&self) -> [usize; 3] {
        let a = self.psi.sys().dims();
        [a[0], a[1], self.phi.sys().dims()[1]]
    }

    /// Least eigenvalue of σ₃.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn epsilon_star(&self) -> f64 {
        let [_, d2, d3] = self.dims();
        epsilon_star(self.mu, d2, d3)
    }

    fn rho1(&self) -> Result<ComplexMatrix> {
        Ok(self.psi.reduced(&[0])?.mat().clone())
    }

    /// A = |Ψ⟩⟨Ψ| ⊗ σ₃⁻¹.
    fn op_a(&self) -> Result<ComplexMatrix> {
        let sigma3_inv = mat_fn(self.phi.reduced(&[1])?.mat(), MatFn::Inverse)?;
        kron(&self.psi.projector(), &sigma3_inv)
    }

    /// B = ρ₁ ⊗ X₂₃(ε)⁻¹, with X⁻¹ = |Φ⟩⟨Φ| + ε⁻¹(I − |Φ⟩⟨Φ|) in closed form.
    fn op_b(&self) -> Result<ComplexMatrix> {
        let p = self.phi.projector();
        let n = p.rows();
        let x_inv = p.add(
            &ComplexMatrix::identity(n)
                .sub(&p)?
                .scale(1.0 / self.epsilon),
        )?;
        kron(&self.rho1()?, &x_inv)
    }
}

/// X₂₃(ε) = |Φ⟩⟨Φ| + ε(I − |Φ⟩⟨Φ|).
pub fn lemma_construct_x23(phi: &StateVector, epsilon: f64) -> Result<ComplexMatrix> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let p = phi.projector();
    let n = p.rows();
    p.add(&ComplexMatrix::identity(n).sub(&p)?.scale(epsilon))
}

/// A ≤ (1 + √ε) B at the instance's ε, without the ε ≤ ε* guard.
///
/// Diagnostics carry μ, ε, ε*, and the verdict and gap of the unscaled
/// comparison A ≤ B.
pub fn lemma_bound_gap(inst: &LemmaInstance, tol: f64) -> Result<GapReport> {
    let a = inst.op_a()?;
    let b = inst.op_b()?;
    let scaled = b.scale(1.0 + inst.epsilon.sqrt());
    let (_, gap) = loewner_leq(&a, &scaled, tol)?;
    let rel = tol * scaled.sub(&a)?.frobenius_norm().max(1.0);
    let (plain_verdict, plain_gap) = loewner_leq(&a, &b, tol)?;
    let [d1, d2, d3] = inst.dims();
    Ok(GapReport::new(
        gap,
        rel,
        diagnostics([
            ("mu", inst.mu()),
            ("epsilon", inst.epsilon),
            ("epsilon_star", inst.epsilon_star()),
            ("dim", (d1 * d2 * d3) as f64),
            ("unscaled_gap", plain_gap),
            ("unscaled_verdict", if plain_verdict { 1.0 } else { 0.0 }),
        ]),
    ))
}

/// [`lemma_bound_gap`], refusing ε above ε*.
pub fn lemma_bound_check(inst: &LemmaInstance, tol: f64) -> Result<GapReport> {
    let threshold = inst.epsilon_star();
    if inst.epsilon > threshold {
        return Err(Error::EpsilonTooLarge {
            epsilon: inst.epsilon,
            threshold,
        });
    }
    lemma_bound_gap(inst, tol)
}

/// Quantities from the proof of the lemma for a test vector `w1` on H₁.
///
/// - `lhs61` = ⟨w₁⊗Φ, A w₁⊗Φ⟩ by direct quadratic form, `rhs61` = ⟨w₁, ρ₁ w₁⟩.
/// - `gram_form` = ⟨a, M a⟩ with a_j = λ_j^{1/2}⟨w₁, u_j⟩ and
///   M_{j′j} = Σ_k ⟨v_{j′}, x_k⟩⟨x_k, v_j⟩ from the Schmidt families
///   Ψ = Σ λ_j^{1/2} u_j⊗v_j and Φ = Σ μ_k^{1/2} x_k⊗y_k; equals `lhs61`.
/// - `gram_min`, `gram_max`, `gram_identity_dev` = ‖M − I‖_F.
/// - `split_bound` = (1 + δ d₂d₃)·lhs61, the δ-split estimate for φ = w₁⊗Φ.
pub fn lemma_internals(inst: &LemmaInstance, w1: &[Complex64], delta: f64) -> Result<Diagnostics> {
    let [d1, d2, d3] = inst.dims();
    if w1.len() != d1 {
        return Err(Error::ShapeMismatch {
            op: "lemma_internals",
            left: (w1.len(), 1),
            right: (d1, 1),
        });
    }
    let a_op = inst.op_a()?;
    let probe = kron_vec(w1, inst.phi.as_slice());
    let lhs61 = a_op.quadratic_form(&probe)?.re;
    let rhs61 = ComplexMatrix::quadratic_form(&inst.rho1()?, w1)?.re;

    let sp = schmidt_decompose(&inst.psi, 1)?;
    let sf = schmidt_decompose(&inst.phi, 1)?;
    let r = sp.rank();
    let gram = ComplexMatrix::from_fn(r, r, |jp, j| {
        sf.left
            .iter()
            .map(|x| inner(&sp.right[jp], x) * inner(x, &sp.right[j]))
            .sum()
    });
    let e = eig_hermitian(&gram, false)?;
    let a: Vec<Complex64> = (0..r)
        .map(|j| inner(w1, &sp.left[j]) * sp.coeffs[j].sqrt())
        .collect();
    let gram_form = gram.quadratic_form(&a)?.re;
    let gram_identity_dev = gram.sub(&ComplexMatrix::identity(r))?.frobenius_norm();

    Ok(diagnostics([
        ("lhs61", lhs61),
        ("rhs61", rhs61),
        ("gram_form", gram_form),
        ("gram_min", e.min()),
        ("gram_max", e.max()),
        ("gram_identity_dev", gram_identity_dev),
        ("gram_rank", r as f64),
        ("delta", delta),
        ("split_bound", (1.0 + delta * (d2 * d3) as f64) * lhs61),
    ]))
}

/// Orthonormal basis of H₂⊗H₃ whose first element is Φ.
fn basis_with_first(phi: &StateVector) -> Result<Vec<Vec<Complex64>>> {
    let n = phi.as_slice().len();
    let comp = ComplexMatrix::identity(n).sub(&phi.projector())?;
    let e = eig_hermitian(&comp, false)?;
    let mut basis = vec![phi.as_slice().to_vec()];
    // eigenvalue 1 eigenvectors span the complement of Φ
    for j in 1..n {
        basis.push(e.vector(j));
    }
    Ok(basis)
}

/// Walk the estimate chain for a general vector φ on H₁⊗H₂⊗H₃ written as
/// φ = Σ_ℓ w_ℓ ⊗ Φ_ℓ with Φ₁ = Φ, using the Cauchy–Schwarz split parameter
/// `delta`.
///
/// Keys: `quad_a` = ⟨φ, Aφ⟩; `rhs62` the δ-split bound in terms of the
/// diagonal blocks of A; `rhs63` after bounding those blocks by
/// d₃μ⁻¹⟨w_ℓ, ρ₁w_ℓ⟩; `rhs67` the bound at δ = √ε/(d₂d₃) with the diagonal
/// claim applied; `quad_b` = ⟨φ, Bφ⟩ directly and `quad_b_blocks` from the
/// block formula ⟨w₁,ρ₁w₁⟩ + ε⁻¹Σ_{ℓ≥2}⟨w_ℓ,ρ₁w_ℓ⟩.
pub fn lemma_split_bound(
    inst: &LemmaInstance,
    phi: &[Complex64],
    delta: f64,
) -> Result<Diagnostics> {
    let [d1, d2, d3] = inst.dims();
    let n23 = d2 * d3;
    if phi.len() != d1 * n23 {
        return Err(Error::ShapeMismatch {
            op: "lemma_split_bound",
            left: (phi.len(), 1),
            right: (d1 * n23, 1),
        });
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument("delta must be positive".into()));
    }
    let a_op = inst.op_a()?;
    let b_op = inst.op_b()?;
    let rho1 = inst.rho1()?;
    let basis = basis_with_first(&inst.phi)?;

    // w_ℓ[i] = ⟨e_i ⊗ Φ_ℓ, φ⟩
    let w: Vec<Vec<Complex64>> = basis
        .iter()
        .map(|b| {
            (0..d1)
                .map(|i| inner(b, &phi[i * n23..(i + 1) * n23]))
                .collect()
        })
        .collect();
    let mut a_diag = Vec::with_capacity(n23);
    let mut r_diag = Vec::with_capacity(n23);
    for (wl, bl) in w.iter().zip(&basis) {
        let v = kron_vec(wl, bl);
        a_diag.push(a_op.quadratic_form(&v)?.re);
        r_diag.push(rho1.quadratic_form(wl)?.re);
    }
    let tail_a: f64 = a_diag[1..].iter().sum();
    let tail_r: f64 = r_diag[1..].iter().sum();
    let n = n23 as f64;
    let mu = inst.mu();
    let eps = inst.epsilon;
    let rhs62 = (1.0 + delta * n) * a_diag[0] + (1.0 / delta + n) * tail_a;
    let rhs63 = (1.0 + delta * n) * a_diag[0] + d3 as f64 / mu * (1.0 / delta + n) * tail_r;
    let rhs67 = (1.0 + eps.sqrt()) * r_diag[0]
        + (d2 * d3 * d3) as f64 / mu * (1.0 / eps.sqrt() + 1.0) * tail_r;
    Ok(diagnostics([
        ("quad_a", a_op.quadratic_form(phi)?.re),
        ("rhs62", rhs62),
        ("rhs63", rhs63),
        ("rhs67", rhs67),
        ("quad_b", b_op.quadratic_form(phi)?.re),
        ("quad_b_blocks", r_diag[0] + tail_r / eps),
        (
            "component_norm_sq",
            w.iter().flatten().map(|z| z.norm_sqr()).sum(),
        ),
        ("delta", delta),
        ("epsilon", eps),
    ]))
}

#[cfg(test)]
fn unit(v: Vec<Complex64>) -> Vec<Complex64> {
    let n = crate::linalg::vec_norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

//! Executable checks for the operator inequality ρ₁⁻¹⊗σ₂₃ ≤ ρ₁₂⁻¹⊗σ₃, its
//! logarithmic and entropic consequences, the pure-state lemma with its
//! internal bounds, and the no-equality analysis.
//!
//! All three-party operators act on H₁⊗H₂⊗H₃ in that factor order.

use std::collections::BTreeMap;

mod entropic;
mod equality;
mod lemma;
mod operator;

pub use entropic::{lkh3_from_trace, reduce_ssa_to_lkh3, regularize_for_log, LOG_MIXING};
pub use equality::{equality_gap_check, inv_trace_product};
pub use lemma::{
    epsilon_star, lemma_bound_check, lemma_bound_gap, lemma_construct_x23, lemma_internals,
    lemma_split_bound, LemmaInstance,
};
pub use operator::{
    check_lkh_log, check_lkh_operator, embed_and_regularize, lkh_difference, lkh_operator_gap,
    normalize_positive, pure_to_mixed_extension_check, regularized_restricted_gap, LkhInstance,
    RegularizedOperator,
};

/// Named scalar diagnostics, ordered by key.
pub type Diagnostics = BTreeMap<String, f64>;

/// Outcome of one inequality check.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    /// Slack of the inequality; negative means violated.
    pub min_eig_gap: f64,
    /// Absolute tolerance the gap was compared against.
    pub relative_tol: f64,
    /// `min_eig_gap >= -relative_tol`.
    pub verdict: bool,
    pub diagnostics: Diagnostics,
}

impl GapReport {
    pub fn new(min_eig_gap: f64, relative_tol: f64, diagnostics: Diagnostics) -> Self {
        Self {
            min_eig_gap,
            relative_tol,
            verdict: min_eig_gap >= -relative_tol,
            diagnostics,
        }
    }

    pub fn diagnostic(&self, key: &str) -> Option<f64> {
        self.diagnostics.get(key).copied()
    }
}

pub(crate) fn diagnostics<const N: usize>(entries: [(&str, f64); N]) -> Diagnostics {
    entries
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

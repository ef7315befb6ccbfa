use std::collections::BTreeMap;
use std::time::Instant;

use clap::ValueEnum;
use lkh_core::entropy::{lkh3_gap, ssa_gap, TripartiteEntropies};
use lkh_core::linalg::dimension_cap;
use lkh_core::rng::{complex_gaussian_vec, stream_rng, StreamRng};
use lkh_core::states::random_density_with;
use lkh_core::verifier::{
    check_lkh_log, check_lkh_operator, equality_gap_check, lemma_bound_check, lemma_bound_gap,
    lemma_internals, lkh3_from_trace, reduce_ssa_to_lkh3, regularized_restricted_gap,
    LemmaInstance, LkhInstance,
};
use lkh_core::{DensityMatrix, Error, MultiSystem};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{Report, TrialError, TrialRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Lkh,
    LkhLog,
    Ssa,
    Lkh3,
    Lemma,
    EqualityGap,
    All,
}

impl Suite {
    pub const INDIVIDUAL: [Suite; 6] = [
        Suite::Lkh,
        Suite::LkhLog,
        Suite::Ssa,
        Suite::Lkh3,
        Suite::Lemma,
        Suite::EqualityGap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lkh => "lkh",
            Suite::LkhLog => "lkh-log",
            Suite::Ssa => "ssa",
            Suite::Lkh3 => "lkh3",
            Suite::Lemma => "lemma",
            Suite::EqualityGap => "equality-gap",
            Suite::All => "all",
        }
    }

    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Self::INDIVIDUAL.to_vec(),
            s => vec![s],
        }
    }
}

/// Evaluates one trial. Implementations must be pure in `(suite, config, index)`.
pub trait TrialRunner: Sync {
    fn run(&self, suite: Suite, config: &RunConfig, index: u64) -> Result<TrialRecord, Error>;
}

/// The real verifier.
#[derive(Debug, Default, Clone, Copy)]
pub struct CoreRunner;

/// Wraps a runner and negates the gap of one trial, marking it failed.
#[derive(Debug, Clone, Copy)]
pub struct NegateGap<R> {
    pub inner: R,
    pub index: u64,
}

impl<R: TrialRunner> TrialRunner for NegateGap<R> {
    fn run(&self, suite: Suite, config: &RunConfig, index: u64) -> Result<TrialRecord, Error> {
        let mut t = self.inner.run(suite, config, index)?;
        if index == self.index {
            t.gap = -t.gap.abs().max(1.0);
            t.verdict = false;
        }
        Ok(t)
    }
}

fn diag(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
    entries.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn record(
    config: &RunConfig,
    index: u64,
    gap: f64,
    verdict: bool,
    diagnostics: BTreeMap<String, f64>,
) -> TrialRecord {
    TrialRecord {
        index,
        seed: config.seed,
        gap,
        verdict,
        diagnostics,
    }
}

/// Tripartite state for the entropy suites.
fn entropy_state(
    dims: [usize; 3],
    config: &RunConfig,
    rng: &mut StreamRng,
) -> Result<DensityMatrix, Error> {
    if config.product {
        let mut parts = dims.iter().map(|&d| {
            let s = MultiSystem::new(vec![d])?;
            let rank = config
                .rank
                .map_or_else(|| rng.random_range(1..=d), |r| r.min(d));
            random_density_with(&s, rank, rng)
        });
        let a = parts.next().expect("three factors")?;
        let b = parts.next().expect("three factors")?;
        let c = parts.next().expect("three factors")?;
        return a.tensor(&b)?.tensor(&c);
    }
    let sys = MultiSystem::new(dims.to_vec())?;
    let n = sys.total_dim();
    let rank = config.rank.unwrap_or_else(|| rng.random_range(1..=n));
    random_density_with(&sys, rank, rng)
}

impl TrialRunner for CoreRunner {
    fn run(&self, suite: Suite, config: &RunConfig, index: u64) -> Result<TrialRecord, Error> {
        let dims = match config.dims.as_slice() {
            &[a, b, c] => [a, b, c],
            d => {
                return Err(Error::InvalidArgument(format!(
                    "need three dimensions, got {d:?}"
                )))
            }
        };
        let mut rng = stream_rng(config.seed, index);
        let tol = config.tol;
        match suite {
            Suite::Lkh => {
                let inst = LkhInstance::random(dims, &mut rng, true)?;
                let r = check_lkh_operator(&inst, tol)?;
                Ok(record(
                    config,
                    index,
                    r.min_eig_gap,
                    r.verdict,
                    r.diagnostics,
                ))
            }
            Suite::LkhLog => {
                let inst = LkhInstance::random(dims, &mut rng, true)?;
                let r = check_lkh_log(&inst, tol)?;
                Ok(record(
                    config,
                    index,
                    r.min_eig_gap,
                    r.verdict,
                    r.diagnostics,
                ))
            }
            Suite::Ssa => {
                let rho = entropy_state(dims, config, &mut rng)?;
                let e = TripartiteEntropies::of(&rho)?;
                let gap = e.ssa_gap();
                let d = diag(&[
                    ("s123", e.s123),
                    ("s12", e.s12),
                    ("s23", e.s23),
                    ("s2", e.s2),
                    ("rank", rho.numerical_rank()? as f64),
                ]);
                Ok(record(config, index, gap, gap >= -tol, d))
            }
            Suite::Lkh3 => {
                let rho = entropy_state(dims, config, &mut rng)?;
                let gap = lkh3_gap(&rho)?;
                let rank = rho.numerical_rank()?;
                let mut d = diag(&[
                    ("trace_form", lkh3_from_trace(&rho)?),
                    ("ssa_gap", ssa_gap(&rho)?),
                    ("rank", rank as f64),
                ]);
                // the purified space has dimension n·rank
                if rho.dim() * rank <= dimension_cap() {
                    let (direct, via) = reduce_ssa_to_lkh3(&rho)?;
                    d.insert("ssa_via_purification".into(), via);
                    d.insert("purification_deviation".into(), (direct - via).abs());
                }
                Ok(record(config, index, gap, gap >= -tol, d))
            }
            Suite::Lemma => {
                let inst = LemmaInstance::random(dims, &mut rng, config.epsilon)?;
                let r = lemma_bound_check(&inst, tol)?;
                let w1 = complex_gaussian_vec(&mut rng, dims[0]);
                let norm = lkh_core::linalg::vec_norm(&w1);
                let w1: Vec<_> = w1.into_iter().map(|z| z / norm).collect();
                let mut d = r.diagnostics;
                let internals =
                    lemma_internals(&inst, &w1, inst.epsilon.sqrt() / (dims[1] * dims[2]) as f64)?;
                for k in ["lhs61", "rhs61", "gram_min", "gram_max"] {
                    d.insert(k.into(), internals[k]);
                }
                Ok(record(config, index, r.min_eig_gap, r.verdict, d))
            }
            Suite::EqualityGap => {
                let inst = LkhInstance::random(dims, &mut rng, true)?;
                let d = equality_gap_check(&inst)?;
                let gap = d["gap"];
                let d2 = dims[1] as f64;
                let verdict = if dims[1] >= 2 {
                    gap > 1e-12 && d["inv_trace_product"] >= d2 * d2 - tol
                } else {
                    gap.abs() <= tol
                };
                Ok(record(config, index, gap, verdict, d))
            }
            Suite::All => Err(Error::InvalidArgument("expand `all` before running".into())),
        }
    }
}

/// Run `config.trials` trials of one suite in parallel and assemble them in
/// index order.
pub fn run_suite(runner: &dyn TrialRunner, suite: Suite, config: &RunConfig) -> Report {
    let start = Instant::now();
    let outcomes: Vec<Result<TrialRecord, (u64, Error)>> = (0..config.trials as u64)
        .into_par_iter()
        .map(|i| runner.run(suite, config, i).map_err(|e| (i, e)))
        .collect();
    let mut trials = Vec::with_capacity(outcomes.len());
    let mut errors = Vec::new();
    for o in outcomes {
        match o {
            Ok(t) => trials.push(t),
            Err((index, e)) => errors.push(TrialError {
                index,
                seed: config.seed,
                message: e.to_string(),
                numerical: e.is_numerical(),
            }),
        }
    }
    Report::new(
        suite.name(),
        config.clone(),
        trials,
        errors,
        start.elapsed().as_secs_f64(),
    )
}

/// Usage-type trial errors (bad dimensions, ε above threshold) abort the run.
pub fn first_usage_error(report: &Report) -> Option<&TrialError> {
    report.errors.iter().find(|e| !e.numerical)
}

/// ε sweep on one pure lemma pair and one regularized LKH instance.
///
/// Each row carries the unguarded lemma gap at ε, whether ε ≤ ε*, and the
/// restricted gap of the ε-regularized instance beside its direct gap.
pub fn sweep_epsilon(config: &RunConfig) -> Result<Report, CliError> {
    let sweep = config
        .eps_sweep
        .ok_or_else(|| CliError::Usage("sweep needs --eps start:stop:points[:log]".into()))?;
    let dims = config.tripartite()?;
    let start = Instant::now();
    let pair = LemmaInstance::random(dims, &mut stream_rng(config.seed, 0), Some(1.0))?;
    let inst = LkhInstance::random(dims, &mut stream_rng(config.seed, 1), true)?;
    let direct = check_lkh_operator(&inst, config.tol)?.min_eig_gap;
    let eps_star = pair.epsilon_star();
    let mut trials = Vec::new();
    for (i, eps) in sweep.values().into_iter().enumerate() {
        let r = lemma_bound_gap(&pair.with_epsilon(eps)?, config.tol)?;
        let reg = regularized_restricted_gap(&inst, dims[1] + 1, eps, config.tol)?;
        let within = eps <= eps_star;
        let d = diag(&[
            ("epsilon", eps),
            ("epsilon_star", eps_star),
            ("within_threshold", if within { 1.0 } else { 0.0 }),
            (
                "unscaled_gap",
                r.diagnostic("unscaled_gap").unwrap_or(f64::NAN),
            ),
            ("regularized_gap", reg.min_eig_gap),
            ("direct_gap", direct),
            ("regularized_minus_direct", reg.min_eig_gap - direct),
        ]);
        // above ε* the bound is not claimed, so only the in-range rows can fail
        let verdict = r.verdict || !within;
        trials.push(record(config, i as u64, r.min_eig_gap, verdict, d));
    }
    Ok(Report::new(
        "sweep",
        config.clone(),
        trials,
        vec![],
        start.elapsed().as_secs_f64(),
    ))
}

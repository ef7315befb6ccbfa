//! Batch verification front end: state generation, seeded verifier suites,
//! ε sweeps and report conversion.
//!
//! Exit codes: 0 all trials pass, 1 a violation was found, 2 usage error,
//! 3 numerical failure. A violation takes precedence over numerical errors.

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod config;
pub mod error;
pub mod report;
pub mod statefile;
pub mod suites;

pub use config::{EpsSweep, OutputFormat, RunConfig};
pub use error::{exit, CliError};
pub use report::{Report, Summary, TrialError, TrialRecord};
pub use statefile::{generate_state, StateFile};
pub use suites::{run_suite, sweep_epsilon, CoreRunner, NegateGap, Suite, TrialRunner};

#[derive(Debug, Parser)]
#[command(
    name = "lkh-verify",
    version,
    about = "Seeded verification of the LKH operator inequality and its entropic consequences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random density matrix as a state file.
    GenState(GenStateArgs),
    /// Run a verifier suite over seeded random instances.
    Verify(VerifyArgs),
    /// Sweep ε for the lemma bound and the regularized inequality.
    Sweep(SweepArgs),
    /// Convert a saved JSON report to another format.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Subsystem dimensions, comma separated.
    #[arg(long, value_parser = config::parse_dims, default_value = "2,2,2")]
    pub dims: ::std::vec::Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
    pub format: OutputFormat,
    /// Cap on the total Hilbert-space dimension.
    #[arg(long, default_value_t = lkh_core::linalg::DEFAULT_DIMENSION_CAP)]
    pub max_dim: usize,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenStateArgs {
    #[arg(long, value_parser = config::parse_dims)]
    pub dims: ::std::vec::Vec<usize>,
    #[arg(long)]
    pub rank: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = lkh_core::linalg::DEFAULT_DIMENSION_CAP)]
    pub max_dim: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Fixed ε for the lemma suite; refused above the instance threshold.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Fixed state rank for the entropy suites.
    #[arg(long)]
    pub rank: Option<usize>,
    /// Draw product states in the entropy suites.
    #[arg(long)]
    pub product: bool,
    /// Negate the gap of this trial index, to exercise the violation path.
    #[arg(long, hide = true)]
    pub inject_violation: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// start:stop:points[:log]
    #[arg(long)]
    pub eps: EpsSweep,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// JSON report written by `verify` or `sweep`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Human)]
    pub format: OutputFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn common_config(c: &CommonArgs, trials: usize) -> RunConfig {
    RunConfig {
        dims: c.dims.clone(),
        trials,
        seed: c.seed,
        tol: c.tol,
        eps_sweep: None,
        output_format: c.format,
        max_dim: c.max_dim,
        epsilon: None,
        rank: None,
        product: false,
    }
}

fn emit(text: &str, out: &Option<PathBuf>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Reports of a `verify` run and the exit code they imply.
pub struct VerifyOutcome {
    pub reports: Vec<Report>,
    pub exit_code: i32,
    pub messages: Vec<String>,
}

/// Run every suite in `suite` with `runner`.
pub fn verify(
    runner: &dyn TrialRunner,
    suite: Suite,
    config: &RunConfig,
) -> Result<VerifyOutcome, CliError> {
    config.validate()?;
    config.tripartite()?;
    let mut reports = Vec::new();
    let mut messages = Vec::new();
    let mut violation = false;
    let mut numerical = false;
    for s in suite.expand() {
        let r = run_suite(runner, s, config);
        if let Some(e) = suites::first_usage_error(&r) {
            return Err(CliError::Usage(format!(
                "{} trial {}: {}",
                r.suite, e.index, e.message
            )));
        }
        for t in r.violations() {
            violation = true;
            messages.push(format!("violation: {}", r.reproducer(t)));
        }
        for e in &r.errors {
            numerical = true;
            messages.push(format!(
                "numerical failure: suite={} dims={} seed={} index={}: {}",
                r.suite,
                config::format_dims(&config.dims),
                e.seed,
                e.index,
                e.message
            ));
        }
        reports.push(r);
    }
    let exit_code = if violation {
        exit::VIOLATION
    } else if numerical {
        exit::NUMERICAL
    } else {
        exit::OK
    };
    Ok(VerifyOutcome {
        reports,
        exit_code,
        messages,
    })
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::GenState(a) => {
            let total: usize = a.dims.iter().product();
            if total > a.max_dim {
                return Err(CliError::Usage(format!(
                    "total dimension {total} exceeds --max-dim {}",
                    a.max_dim
                )));
            }
            if a.rank == 0 || a.rank > total {
                return Err(CliError::Usage(format!(
                    "rank {} outside 1..={total}",
                    a.rank
                )));
            }
            lkh_core::linalg::set_dimension_cap(a.max_dim);
            let f = generate_state(&a.dims, a.rank, a.seed)?;
            emit(&f.to_json()?, &a.out, stdout)?;
            Ok(exit::OK)
        }
        Command::Verify(a) => {
            let mut config = common_config(&a.common, a.trials);
            config.epsilon = a.epsilon;
            config.rank = a.rank;
            config.product = a.product;
            config.validate()?;
            lkh_core::linalg::set_dimension_cap(config.max_dim);
            let outcome = match a.inject_violation {
                Some(index) => verify(
                    &NegateGap {
                        inner: CoreRunner,
                        index,
                    },
                    a.suite,
                    &config,
                )?,
                None => verify(&CoreRunner, a.suite, &config)?,
            };
            emit(
                &report::render(&outcome.reports, config.output_format)?,
                &a.common.out,
                stdout,
            )?;
            for m in &outcome.messages {
                writeln!(stderr, "{m}")?;
            }
            Ok(outcome.exit_code)
        }
        Command::Sweep(a) => {
            let mut config = common_config(&a.common, a.eps.points);
            config.eps_sweep = Some(a.eps);
            config.validate()?;
            lkh_core::linalg::set_dimension_cap(config.max_dim);
            let r = sweep_epsilon(&config)?;
            emit(
                &report::render(std::slice::from_ref(&r), config.output_format)?,
                &a.common.out,
                stdout,
            )?;
            if r.summary.failures > 0 {
                for t in r.violations() {
                    writeln!(stderr, "violation: {}", r.reproducer(t))?;
                }
                return Ok(exit::VIOLATION);
            }
            Ok(exit::OK)
        }
        Command::Report(a) => {
            let reports = report::parse_reports(&std::fs::read_to_string(&a.input)?)?;
            emit(&report::render(&reports, a.format)?, &a.out, stdout)?;
            Ok(exit::OK)
        }
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

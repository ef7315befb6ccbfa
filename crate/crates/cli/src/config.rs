use std::fmt;
use std::str::FromStr;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Human,
    Json,
    Csv,
}

/// `start:stop:points[:log]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsSweep {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub log: bool,
}

impl EpsSweep {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / last;
                if self.log {
                    let (a, b) = (self.start.log10(), self.stop.log10());
                    10f64.powf(a + t * (b - a))
                } else {
                    self.start + t * (self.stop - self.start)
                }
            })
            .collect()
    }
}

impl FromStr for EpsSweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(format!("expected start:stop:points[:log], got {s:?}"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
        let start = num(parts[0])?;
        let stop = num(parts[1])?;
        let points: usize = parts[2]
            .trim()
            .parse()
            .map_err(|e| format!("{:?}: {e}", parts[2]))?;
        let log = match parts.get(3).map(|p| p.trim()) {
            None | Some("lin") => false,
            Some("log") => true,
            Some(other) => return Err(format!("spacing must be log or lin, got {other:?}")),
        };
        if points == 0 {
            return Err("sweep needs at least one point".into());
        }
        if !(start > 0.0 && stop > 0.0 && start.is_finite() && stop.is_finite()) {
            return Err("sweep endpoints must be positive and finite".into());
        }
        Ok(Self {
            start,
            stop,
            points,
            log,
        })
    }
}

impl fmt::Display for EpsSweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.points)?;
        if self.log {
            write!(f, ":log")?;
        }
        Ok(())
    }
}

/// Comma-separated subsystem dimensions.
pub fn parse_dims(s: &str) -> Result<Vec<usize>, String> {
    let dims = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if dims.is_empty() || dims.contains(&0) {
        return Err(format!("dimensions must be positive, got {s:?}"));
    }
    Ok(dims)
}

pub fn format_dims(dims: &[usize]) -> String {
    dims.iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Settings shared by every run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub eps_sweep: Option<EpsSweep>,
    pub output_format: OutputFormat,
    pub max_dim: usize,
    /// Fixed ε for the lemma suite; `None` uses a tenth of each instance's threshold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Fixed state rank for the entropy suites; `None` draws it per trial.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// Restrict the entropy suites to product states.
    #[serde(default)]
    pub product: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 2, 2],
            trials: 100,
            seed: 0,
            tol: 1e-9,
            eps_sweep: None,
            output_format: OutputFormat::Human,
            max_dim: lkh_core::linalg::DEFAULT_DIMENSION_CAP,
            epsilon: None,
            rank: None,
            product: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Usage("trials must be at least 1".into()));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(CliError::Usage(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(CliError::Usage("dimensions must be positive".into()));
        }
        let total = self
            .dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .unwrap_or(usize::MAX);
        if total > self.max_dim {
            return Err(CliError::Usage(format!(
                "total dimension {total} exceeds --max-dim {}",
                self.max_dim
            )));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0) {
                return Err(CliError::Usage(format!(
                    "epsilon must be positive, got {e}"
                )));
            }
        }
        if let Some(r) = self.rank {
            if r == 0 || r > total {
                return Err(CliError::Usage(format!("rank {r} outside 1..={total}")));
            }
        }
        Ok(())
    }

    pub fn tripartite(&self) -> Result<[usize; 3], CliError> {
        match self.dims.as_slice() {
            &[a, b, c] => Ok([a, b, c]),
            d => Err(CliError::Usage(format!(
                "this command needs three dimensions d1,d2,d3, got {}",
                format_dims(d)
            ))),
        }
    }
}

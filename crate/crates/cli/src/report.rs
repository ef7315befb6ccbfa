use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::config::{format_dims, OutputFormat, RunConfig};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u64,
    pub seed: u64,
    pub gap: f64,
    pub verdict: bool,
    pub diagnostics: BTreeMap<String, f64>,
}

/// A trial that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialError {
    pub index: u64,
    pub seed: u64,
    pub message: String,
    pub numerical: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min_gap: f64,
    pub median_gap: f64,
    pub failures: usize,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub config: RunConfig,
    pub trials: Vec<TrialRecord>,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<TrialError>,
}

fn median(sorted: &[f64]) -> f64 {
    match sorted.len() {
        0 => 0.0,
        n if n % 2 == 1 => sorted[n / 2],
        n => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
    }
}

impl Report {
    /// Assemble a report; trials are sorted by index.
    pub fn new(
        suite: &str,
        config: RunConfig,
        mut trials: Vec<TrialRecord>,
        mut errors: Vec<TrialError>,
        wall_time: f64,
    ) -> Self {
        trials.sort_by_key(|t| t.index);
        errors.sort_by_key(|e| e.index);
        let mut gaps: Vec<f64> = trials
            .iter()
            .map(|t| t.gap)
            .filter(|g| !g.is_nan())
            .collect();
        gaps.sort_by(f64::total_cmp);
        let summary = Summary {
            min_gap: gaps.first().copied().unwrap_or(0.0),
            median_gap: median(&gaps),
            failures: trials.iter().filter(|t| !t.verdict).count(),
            wall_time,
        };
        Self {
            suite: suite.to_string(),
            config,
            trials,
            summary,
            errors,
        }
    }

    pub fn violations(&self) -> impl Iterator<Item = &TrialRecord> {
        self.trials.iter().filter(|t| !t.verdict)
    }

    /// One line naming the (dims, seed, index) triple that reproduces a trial.
    pub fn reproducer(&self, t: &TrialRecord) -> String {
        format!(
            "suite={} dims={} seed={} index={} gap={:e}",
            self.suite,
            format_dims(&self.config.dims),
            t.seed,
            t.index,
            t.gap
        )
    }

    /// The same report with `wall_time` zeroed, for comparisons.
    pub fn without_wall_time(&self) -> Self {
        let mut r = self.clone();
        r.summary.wall_time = 0.0;
        r
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn diagnostic_keys(&self) -> Vec<String> {
        let keys: BTreeSet<&String> = self
            .trials
            .iter()
            .flat_map(|t| t.diagnostics.keys())
            .collect();
        keys.into_iter().cloned().collect()
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        reports_to_csv(std::slice::from_ref(self))
    }

    pub fn to_human(&self) -> String {
        let mut rows = vec![[
            "index".to_string(),
            "seed".into(),
            "gap".into(),
            "verdict".into(),
        ]];
        for t in &self.trials {
            rows.push([
                t.index.to_string(),
                t.seed.to_string(),
                format!("{:.6e}", t.gap),
                if t.verdict { "pass" } else { "FAIL" }.into(),
            ]);
        }
        let widths: Vec<usize> = (0..4)
            .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = format!(
            "suite {}  dims {}  seed {}  trials {}  tol {:e}\n",
            self.suite,
            format_dims(&self.config.dims),
            self.config.seed,
            self.config.trials,
            self.config.tol
        );
        for r in &rows {
            let line: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        for e in &self.errors {
            out.push_str(&format!("error at index {}: {}\n", e.index, e.message));
        }
        out.push_str(&format!(
            "min gap {:.6e}  median gap {:.6e}  failures {}  errors {}  wall time {:.3}s\n",
            self.summary.min_gap,
            self.summary.median_gap,
            self.summary.failures,
            self.errors.len(),
            self.summary.wall_time
        ));
        out
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// One CSV row per trial across all reports, diagnostics as extra columns.
pub fn reports_to_csv(reports: &[Report]) -> Result<String, CliError> {
    let keys: BTreeSet<String> = reports.iter().flat_map(|r| r.diagnostic_keys()).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "suite".to_string(),
        "index".into(),
        "seed".into(),
        "gap".into(),
        "verdict".into(),
    ];
    header.extend(keys.iter().cloned());
    w.write_record(&header)?;
    for r in reports {
        for t in &r.trials {
            let mut row = vec![
                r.suite.clone(),
                t.index.to_string(),
                t.seed.to_string(),
                sig17(t.gap),
                t.verdict.to_string(),
            ];
            row.extend(
                keys.iter()
                    .map(|k| t.diagnostics.get(k).map(|&v| sig17(v)).unwrap_or_default()),
            );
            w.write_record(&row)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Serialize one or more reports. A single report is a JSON object, several
/// form an array.
pub fn render(reports: &[Report], format: OutputFormat) -> Result<String, CliError> {
    match format {
        OutputFormat::Json => {
            let mut s = if let [one] = reports {
                one.to_json()?
            } else {
                serde_json::to_string_pretty(reports)?
            };
            s.push('\n');
            Ok(s)
        }
        OutputFormat::Csv => reports_to_csv(reports),
        OutputFormat::Human => Ok(reports
            .iter()
            .map(Report::to_human)
            .collect::<Vec<_>>()
            .join("\n")),
    }
}

/// Parse the output of [`render`] in JSON form.
pub fn parse_reports(s: &str) -> Result<Vec<Report>, CliError> {
    let v: serde_json::Value = serde_json::from_str(s)?;
    if v.is_array() {
        Ok(serde_json::from_value(v)?)
    } else {
        Ok(vec![serde_json::from_value(v)?])
    }
}

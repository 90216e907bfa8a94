//! Sweep reports in CSV, JSON and long (plot-ready) form.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::fit::FitResult;
use super::spec::SweepSpec;

/// Column order of the CSV report.
pub const CSV_COLUMNS: [&str; 10] = [
    "family",
    "n",
    "seed",
    "energy_fraction",
    "min_gap_hz",
    "bandwidth_hz",
    "required_samples",
    "required_duration_s",
    "decision_accuracy",
    "wall_time_s",
];

/// One `(family, n)` observation. Unmeasured metrics are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: String,
    pub n: usize,
    pub seed: u64,
    pub energy_fraction: Option<f64>,
    pub min_gap_hz: Option<f64>,
    pub bandwidth_hz: Option<f64>,
    /// With `required_samples_censored`, the ceiling that was hit.
    pub required_samples: Option<u64>,
    #[serde(default)]
    pub required_samples_censored: bool,
    pub required_duration_s: Option<f64>,
    pub decision_accuracy: Option<f64>,
    pub wall_time_s: Option<f64>,
}

impl SweepRow {
    pub fn new(family: String, n: usize, seed: u64) -> Self {
        Self {
            family,
            n,
            seed,
            energy_fraction: None,
            min_gap_hz: None,
            bandwidth_hz: None,
            required_samples: None,
            required_samples_censored: false,
            required_duration_s: None,
            decision_accuracy: None,
            wall_time_s: None,
        }
    }

    fn required_samples_field(&self) -> Option<String> {
        self.required_samples.map(|v| {
            if self.required_samples_censored {
                format!(">{v}")
            } else {
                v.to_string()
            }
        })
    }

    /// Populated float metrics in schema order, as `(column, value)`.
    fn metrics(&self) -> [(&'static str, Option<String>); 7] {
        let f = |v: Option<f64>| v.map(|x| x.to_string());
        [
            ("energy_fraction", f(self.energy_fraction)),
            ("min_gap_hz", f(self.min_gap_hz)),
            ("bandwidth_hz", f(self.bandwidth_hz)),
            ("required_samples", self.required_samples_field()),
            ("required_duration_s", f(self.required_duration_s)),
            ("decision_accuracy", f(self.decision_accuracy)),
            ("wall_time_s", f(self.wall_time_s)),
        ]
    }
}

/// Log-linear fit of one metric for one family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyFit {
    pub family: String,
    /// Fitted quantity, e.g. `log2(energy_fraction)`.
    pub metric: String,
    #[serde(flatten)]
    pub fit: FitResult,
}

/// First `n` at which decision accuracy fell below the reliability target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    pub family: String,
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    pub fit: Vec<FamilyFit>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub crossover: Vec<Crossover>,
}

impl Report {
    pub fn fit_for(&self, family: &str) -> Option<&FitResult> {
        self.fit.iter().find(|f| f.family == family).map(|f| &f.fit)
    }

    pub fn rows_for<'a>(&'a self, family: &'a str) -> impl Iterator<Item = &'a SweepRow> + 'a {
        self.rows.iter().filter(move |r| r.family == family)
    }

    pub fn crossover_for(&self, family: &str) -> Option<usize> {
        self.crossover.iter().find(|c| c.family == family).and_then(|c| c.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    /// `metric,name,value` rows for external plotting.
    Long,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "long" => Ok(ReportFormat::Long),
            other => Err(format!("unknown report format `{other}` (csv, json, long)")),
        }
    }
}

pub fn emit_report(report: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => rows_csv(&report.rows),
        ReportFormat::Json => {
            let mut out = serde_json::to_string_pretty(report).expect("report serializes");
            out.push('\n');
            out
        }
        ReportFormat::Long => long_csv(report),
    }
}

/// The CSV table alone; an empty slice gives just the header.
pub fn rows_csv(rows: &[SweepRow]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for row in rows {
        let _ = write!(out, "{},{},{}", row.family, row.n, row.seed);
        for (_, value) in row.metrics() {
            out.push(',');
            if let Some(v) = value {
                out.push_str(&v);
            }
        }
        out.push('\n');
    }
    out
}

fn long_csv(report: &Report) -> String {
    let mut out = String::from("metric,name,value\n");
    for row in &report.rows {
        for (metric, value) in row.metrics() {
            if let Some(v) = value {
                let _ = writeln!(out, "{metric},{}:n={},{v}", row.family, row.n);
            }
        }
    }
    for f in &report.fit {
        let name = format!("{}:{}", f.family, f.metric);
        let _ = writeln!(out, "fit_slope,{name},{}", f.fit.slope);
        let _ = writeln!(out, "fit_intercept,{name},{}", f.fit.intercept);
        let _ = writeln!(out, "fit_r_squared,{name},{}", f.fit.r_squared);
    }
    for c in &report.crossover {
        if let Some(n) = c.n {
            let _ = writeln!(out, "crossover_n,{},{n}", c.family);
        }
    }
    out
}

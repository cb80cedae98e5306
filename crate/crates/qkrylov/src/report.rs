//! Experiment report rows. The CLI serializes these to CSV/JSON; algorithm
//! modules fill them in. Wall time deliberately lives elsewhere so reports
//! stay byte-identical across runs with the same seed.

use serde::{Deserialize, Serialize};

use crate::qsim::QueryCounters;

pub const REPORT_FORMAT_VERSION: &str = "1";

/// One experiment row: parameters, measured quantities, the paper-predicted
/// bound evaluated numerically, and the query counters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub seed: u64,
    pub config_hash: String,
    /// Ordered (name, value) parameter pairs; ordering is part of the format.
    pub params: Vec<(String, f64)>,
    pub fidelity: Option<f64>,
    pub measured_error: Option<f64>,
    pub predicted_bound: Option<f64>,
    /// Set on rows where `predicted_bound >= measured_error` must hold.
    pub bound_check: Option<bool>,
    pub success_probability: Option<f64>,
    pub queries: QueryCounters,
    pub notes: Vec<String>,
}

impl ReportRow {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            seed: 0,
            config_hash: String::new(),
            params: Vec::new(),
            fidelity: None,
            measured_error: None,
            predicted_bound: None,
            bound_check: None,
            success_probability: None,
            queries: QueryCounters::default(),
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, name: &str, value: f64) -> Self {
        self.params.push((name.to_string(), value));
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    /// Record a measured error against its predicted bound and flag the row
    /// for the bound check.
    pub fn bound(mut self, measured: f64, predicted: f64) -> Self {
        self.measured_error = Some(measured);
        self.predicted_bound = Some(predicted);
        self.bound_check = Some(measured <= predicted);
        self
    }

    fn params_key(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.params {
            s.push_str(k);
            s.push('=');
            s.push_str(&format!("{v:.12e};"));
        }
        s
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub format_version: String,
    pub rows: Vec<ReportRow>,
}

impl Default for ExperimentReport {
    fn default() -> Self {
        Self::new()
    }
}

impl ExperimentReport {
    pub fn new() -> Self {
        Self {
            format_version: REPORT_FORMAT_VERSION.to_string(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: ExperimentReport) {
        self.rows.extend(other.rows);
    }

    /// Stable order: by experiment id, then by the parameter tuple.
    pub fn sort_rows(&mut self) {
        self.rows
            .sort_by(|a, b| (a.experiment.as_str(), a.params_key())
                .cmp(&(b.experiment.as_str(), b.params_key())));
    }

    pub fn stamp(&mut self, seed: u64, config_hash: &str) {
        for row in &mut self.rows {
            row.seed = seed;
            row.config_hash = config_hash.to_string();
        }
    }

    /// Rows whose bound check failed.
    pub fn violations(&self) -> Vec<&ReportRow> {
        self.rows
            .iter()
            .filter(|r| r.bound_check == Some(false))
            .collect()
    }

    pub fn all_bounds_hold(&self) -> bool {
        self.violations().is_empty()
    }

    /// Fixed-schema CSV; `None` renders as an empty cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "experiment,seed,config_hash,params,fidelity,measured_error,predicted_bound,\
             bound_check,success_probability,controlled_u,state_preps,postselections,notes\n",
        );
        for r in &self.rows {
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let bc = r
                .bound_check
                .map(|b| if b { "pass" } else { "FAIL" }.to_string())
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.experiment,
                r.seed,
                r.config_hash,
                r.params_key(),
                opt(r.fidelity),
                opt(r.measured_error),
                opt(r.predicted_bound),
                bc,
                opt(r.success_probability),
                r.queries.controlled_u,
                r.queries.state_preps,
                r.queries.postselections,
                r.notes.join(" | "),
            ));
        }
        out
    }
}

//! Per-file evaluation reports and their three renderings.
//!
//! JSON schema (one object per input file; several inputs give an array):
//!
//! ```text
//! {
//!   "input": "path/as/given.csv",
//!   "metrics": [
//!     { "name": "MAE", "value": 1.0, "dimension": "same-as-data", "skipped": 0, "actions": [] },
//!     { "name": "GMAE", "error": { "code": "GeometricMeanDomain", "message": "..." },
//!       "dimension": "same-as-data", "skipped": 0, "actions": [] }
//!   ],
//!   "policy": { "zero_denominator": "fail", "nonpositive_log_ratio": "fail" },
//!   "version": "0.1.0"
//! }
//! ```

use std::fmt::Write as _;

use serde::Serialize;
use typometrics::types::PolicyAction;
use typometrics::{
    evaluate, evaluate_metric, BenchmarkInput, Dimension, EvaluationPolicy, MetricError,
    MetricResult, Registry, SeriesPair,
};

use crate::config::Selection;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorEntry {
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricEntry {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorEntry>,
    pub dimension: Option<Dimension>,
    pub skipped: usize,
    pub actions: Vec<PolicyAction>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub input: String,
    pub metrics: Vec<MetricEntry>,
    pub policy: EvaluationPolicy,
    pub version: &'static str,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.metrics.iter().filter(|m| m.error.is_some()).count()
    }
}

fn entry(
    name: String,
    dimension: Option<Dimension>,
    result: Result<MetricResult, MetricError>,
) -> MetricEntry {
    match result {
        Ok(r) => MetricEntry {
            name,
            value: Some(r.value),
            error: None,
            dimension: Some(r.dimension),
            skipped: r.points_skipped,
            actions: r.policy_actions,
        },
        Err(e) => MetricEntry {
            name,
            value: None,
            error: Some(ErrorEntry {
                code: e.code(),
                message: e.to_string(),
            }),
            dimension,
            skipped: 0,
            actions: Vec::new(),
        },
    }
}

/// Evaluates every selection on one pair, in selection order.
pub fn evaluate_all(
    input: String,
    pair: &SeriesPair,
    selections: &[Selection],
    aux: &[BenchmarkInput],
    policy: &EvaluationPolicy,
) -> Report {
    let metrics = selections
        .iter()
        .map(|s| match s {
            Selection::Named(member) => {
                let dimension = Registry::global()
                    .lookup(&member.name)
                    .ok()
                    .map(|d| d.dimension);
                entry(
                    member.to_string(),
                    dimension,
                    evaluate_metric(pair, member, aux, policy),
                )
            }
            Selection::Composed { label, composition } => entry(
                label.clone(),
                Some(composition.dimension()),
                evaluate(pair, composition, policy),
            ),
        })
        .collect();
    Report {
        input,
        metrics,
        policy: *policy,
        version: VERSION,
    }
}

pub fn to_json(reports: &[Report]) -> String {
    let mut text = match reports {
        [one] => serde_json::to_string_pretty(one),
        many => serde_json::to_string_pretty(many),
    }
    .expect("reports serialize");
    text.push('\n');
    text
}

fn format_value(value: f64, dimension: Option<Dimension>) -> String {
    match dimension {
        Some(Dimension::Percent) => format!("{value}%"),
        _ => value.to_string(),
    }
}

fn policy_text(p: &EvaluationPolicy) -> String {
    serde_json::to_string(p).expect("policy serializes")
}

pub fn to_human(reports: &[Report]) -> String {
    let mut out = String::new();
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "input: {}", r.input);
        let width = r
            .metrics
            .iter()
            .map(|m| m.name.chars().count())
            .max()
            .unwrap_or(0);
        for m in &r.metrics {
            let body = match (&m.value, &m.error) {
                (Some(v), _) => format_value(*v, m.dimension),
                (None, Some(e)) => format!("error {}: {}", e.code, e.message),
                (None, None) => String::new(),
            };
            let _ = write!(out, "  {:<width$}  {body}", m.name);
            if m.skipped > 0 || !m.actions.is_empty() {
                let _ = write!(
                    out,
                    "  (skipped {}, {} policy actions)",
                    m.skipped,
                    m.actions.len()
                );
            }
            out.push('\n');
        }
        let _ = writeln!(out, "policy: {}", policy_text(&r.policy));
    }
    out
}

pub fn to_delimited(reports: &[Report]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record([
        "input",
        "name",
        "value",
        "error",
        "dimension",
        "skipped",
        "actions",
    ]);
    for r in reports {
        for m in &r.metrics {
            let _ = w.write_record([
                r.input.clone(),
                m.name.clone(),
                m.value.map(|v| v.to_string()).unwrap_or_default(),
                m.error
                    .as_ref()
                    .map(|e| e.code.to_string())
                    .unwrap_or_default(),
                m.dimension
                    .map(|d| d.as_str().to_string())
                    .unwrap_or_default(),
                m.skipped.to_string(),
                m.actions.len().to_string(),
            ]);
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 output")
}

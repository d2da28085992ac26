//! Check specs, reports and their serialised forms.
//!
//! JSON schema 1:
//!
//! ```text
//! { "schema": 1, "seed": u64, "profile": "default" | "strict",
//!   "reports": [ { "check_id", "parameters", "residual", "residuals",
//!                  "order", "order_band", "tolerance", "pass",
//!                  "runtime_ms", "notes" } ] }
//! ```
//!
//! `residual` and `order` are `null` when a check could not produce them.
//! Floats are written in shortest round-trip form.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::checks::{registry, Profile};
use crate::error::{LabError, LabResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub check_id: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, Value>,
    pub tolerance: f64,
    pub refinements: usize,
}

/// Spec-file entry; missing fields take the registry defaults.
#[derive(Debug, Clone, Deserialize)]
struct CheckSpecEntry {
    check_id: String,
    #[serde(default)]
    parameters: BTreeMap<String, Value>,
    tolerance: Option<f64>,
    refinements: Option<usize>,
}

impl CheckSpec {
    /// Registry defaults for `check_id` under `profile`.
    pub fn default_for(check_id: &str, profile: Profile) -> LabResult<Self> {
        let def = registry().iter().find(|d| d.id == check_id).ok_or_else(|| LabError::UnknownCheck(check_id.to_string()))?;
        Ok(CheckSpec { check_id: def.id.to_string(), parameters: BTreeMap::new(), tolerance: def.tolerance(profile), refinements: def.refinements })
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    /// Tolerance `0` demands exact equality; negative or non-finite values
    /// are rejected.
    pub fn validate(&self) -> LabResult<()> {
        let bad = |reason: &str| Err(LabError::InvalidSpec { check_id: self.check_id.clone(), reason: reason.to_string() });
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return bad("tolerance must be finite and non-negative");
        }
        if self.refinements < 1 {
            return bad("refinements must be at least 1");
        }
        Ok(())
    }

    /// Parses a JSON array of specs, filling omitted fields from the registry.
    pub fn parse_list(json: &str, profile: Profile) -> LabResult<Vec<CheckSpec>> {
        let entries: Vec<CheckSpecEntry> = serde_json::from_str(json)?;
        entries
            .into_iter()
            .map(|e| {
                let base = CheckSpec::default_for(&e.check_id, profile)?;
                let spec = CheckSpec {
                    parameters: e.parameters,
                    tolerance: e.tolerance.unwrap_or(base.tolerance),
                    refinements: e.refinements.unwrap_or(base.refinements),
                    ..base
                };
                spec.validate()?;
                Ok(spec)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderBand {
    pub target: f64,
    pub band: f64,
}

impl OrderBand {
    pub fn contains(&self, order: f64) -> bool {
        (order - self.target).abs() <= self.band
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_id: String,
    pub parameters: BTreeMap<String, Value>,
    pub residual: Option<f64>,
    pub residuals: Vec<f64>,
    pub order: Option<f64>,
    pub order_band: Option<OrderBand>,
    pub tolerance: f64,
    pub pass: bool,
    pub runtime_ms: u64,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: u32,
    pub seed: u64,
    pub profile: Profile,
    pub reports: Vec<VerificationReport>,
}

impl ReportDocument {
    pub fn new(seed: u64, profile: Profile, reports: Vec<VerificationReport>) -> Self {
        ReportDocument { schema: SCHEMA_VERSION, seed, profile, reports }
    }

    /// Copy with every `runtime_ms` zeroed, for byte comparisons.
    pub fn without_runtime(&self) -> Self {
        let mut d = self.clone();
        d.reports.iter_mut().for_each(|r| r.runtime_ms = 0);
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Table,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:e}"))
}

pub fn emit_report(doc: &ReportDocument, format: Format) -> LabResult<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(doc)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Table => Ok(table(doc).into_bytes()),
    }
}

fn table(doc: &ReportDocument) -> String {
    let mut s = String::new();
    let width = doc.reports.iter().map(|r| r.check_id.len()).max().unwrap_or(8).max(8);
    let _ = writeln!(s, "{:<width$}  {:<4}  {:<24}  {:<10}  {:<20}  {:>8}", "check", "pass", "residual", "tolerance", "order", "ms");
    for r in &doc.reports {
        let order = match (r.order, r.order_band) {
            (Some(o), Some(b)) => format!("{o:.4} ({}±{})", b.target, b.band),
            (o, _) => opt(o),
        };
        let pass = if r.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{:<width$}  {pass:<4}  {:<24}  {:<10}  {order:<20}  {:>8}", r.check_id, opt(r.residual), format!("{:e}", r.tolerance), r.runtime_ms);
        for n in &r.notes {
            let _ = writeln!(s, "{:<width$}    {n}", "");
        }
    }
    let failed = doc.reports.iter().filter(|r| !r.pass).count();
    let _ = writeln!(s, "seed {}  profile {}  {} checks  {} failed", doc.seed, doc.profile, doc.reports.len(), failed);
    s
}

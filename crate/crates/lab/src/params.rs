//! Typed access to a check's parameter map.
//!
//! Every read records the effective value, defaults included, so a report
//! carries exactly the parameters needed to replay it.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use serde_json::Value;
use toa_core::dirac::Spin;
use toa_core::fock::Species;

use crate::error::{LabError, LabResult};

pub struct Params<'a> {
    given: &'a BTreeMap<String, Value>,
    used: RefCell<BTreeMap<String, Value>>,
}

fn bad(key: &str, reason: impl Into<String>) -> LabError {
    LabError::Parameter { key: key.to_string(), reason: reason.into() }
}

impl<'a> Params<'a> {
    pub fn new(given: &'a BTreeMap<String, Value>) -> Self {
        Params { given, used: RefCell::new(BTreeMap::new()) }
    }

    fn record(&self, key: &str, v: Value) {
        self.used.borrow_mut().insert(key.to_string(), v);
    }

    pub fn f64(&self, key: &str, default: f64) -> LabResult<f64> {
        let v = match self.given.get(key) {
            None => default,
            Some(v) => v.as_f64().ok_or_else(|| bad(key, format!("expected a number, got {v}")))?,
        };
        if !v.is_finite() {
            return Err(bad(key, "must be finite"));
        }
        self.record(key, Value::from(v));
        Ok(v)
    }

    pub fn usize(&self, key: &str, default: usize) -> LabResult<usize> {
        let v = match self.given.get(key) {
            None => default,
            Some(v) => v.as_u64().ok_or_else(|| bad(key, format!("expected a non-negative integer, got {v}")))? as usize,
        };
        self.record(key, Value::from(v));
        Ok(v)
    }

    pub fn i64_list(&self, key: &str, default: &[i64]) -> LabResult<Vec<i64>> {
        let v = match self.given.get(key) {
            None => default.to_vec(),
            Some(Value::Array(a)) => a.iter().map(|x| x.as_i64().ok_or_else(|| bad(key, format!("expected integers, got {x}")))).collect::<LabResult<_>>()?,
            Some(Value::Number(n)) => vec![n.as_i64().ok_or_else(|| bad(key, "expected an integer"))?],
            Some(v) => return Err(bad(key, format!("expected a list of integers, got {v}"))),
        };
        self.record(key, Value::from(v.clone()));
        Ok(v)
    }

    /// A single value overrides the default list.
    pub fn f64_or_list(&self, key: &str, default: &[f64]) -> LabResult<Vec<f64>> {
        let v = match self.given.get(key) {
            None => default.to_vec(),
            Some(Value::Array(a)) => a.iter().map(|x| x.as_f64().ok_or_else(|| bad(key, format!("expected numbers, got {x}")))).collect::<LabResult<_>>()?,
            Some(v) => vec![v.as_f64().ok_or_else(|| bad(key, format!("expected a number, got {v}")))?],
        };
        if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
            return Err(bad(key, "needs at least one finite value"));
        }
        self.record(key, Value::from(v.clone()));
        Ok(v)
    }

    /// `up`, `down` or `both`.
    pub fn spins(&self, key: &str, default: &[Spin]) -> LabResult<Vec<Spin>> {
        let v = match self.given.get(key) {
            None => default.to_vec(),
            Some(Value::String(s)) => parse_spins(s).ok_or_else(|| bad(key, format!("expected up, down or both, got {s}")))?,
            Some(v) => return Err(bad(key, format!("expected a string, got {v}"))),
        };
        let label = match v.as_slice() {
            [s] => s.to_string(),
            _ => "both".to_string(),
        };
        self.record(key, Value::from(label));
        Ok(v)
    }

    /// Effective parameters plus the names of given keys no read consumed.
    pub fn finish(self) -> (BTreeMap<String, Value>, Vec<String>) {
        let used = self.used.into_inner();
        let seen: BTreeSet<&String> = used.keys().collect();
        let unused = self.given.keys().filter(|k| !seen.contains(k)).cloned().collect();
        (used, unused)
    }
}

pub fn parse_spins(s: &str) -> Option<Vec<Spin>> {
    match s.to_ascii_lowercase().as_str() {
        "up" | "+" | "+1/2" | "0.5" => Some(vec![Spin::Up]),
        "down" | "-" | "-1/2" | "-0.5" => Some(vec![Spin::Down]),
        "both" => Some(Spin::BOTH.to_vec()),
        _ => None,
    }
}

pub fn parse_species(s: &str) -> Option<Vec<Species>> {
    match s.to_ascii_lowercase().as_str() {
        "electron" | "e" => Some(vec![Species::ElectronEvent]),
        "positron" | "p" => Some(vec![Species::PositronEvent]),
        "both" => Some(Species::BOTH.to_vec()),
        _ => None,
    }
}

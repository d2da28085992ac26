//! Suite execution.
//!
//! Checks run on scoped threads; results are merged in declaration order.
//! Each check draws from its own ChaCha stream seeded by the suite seed and
//! the check id, so reports do not depend on scheduling.

use std::collections::BTreeMap;
use std::thread;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::checks::{find, Outcome};
use crate::error::LabResult;
use crate::params::Params;
use crate::report::{CheckSpec, VerificationReport};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub reports: Vec<VerificationReport>,
}

impl SuiteOutcome {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    /// 0 when every check passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }
}

/// FNV-1a, fixed across platforms and releases.
fn stable_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub fn check_rng(seed: u64, check_id: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ stable_hash(check_id))
}

/// Unknown check ids and malformed specs are rejected before anything runs.
/// Failures inside a check (bad grids, invalid kinematics) become failing
/// reports.
pub fn run_suite(specs: &[CheckSpec], seed: u64) -> LabResult<SuiteOutcome> {
    let defs = specs
        .iter()
        .map(|s| {
            s.validate()?;
            find(&s.check_id)
        })
        .collect::<LabResult<Vec<_>>>()?;
    let reports = thread::scope(|scope| {
        let handles: Vec<_> = specs.iter().zip(defs).map(|(spec, def)| scope.spawn(move || run_one(spec, def.run, seed))).collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    });
    Ok(SuiteOutcome { reports })
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn run_one(spec: &CheckSpec, run: fn(&CheckSpec, &Params, &mut ChaCha8Rng) -> LabResult<Outcome>, seed: u64) -> VerificationReport {
    let start = Instant::now();
    let params = Params::new(&spec.parameters);
    let result = run(spec, &params, &mut check_rng(seed, &spec.check_id));
    let (parameters, unused) = params.finish();
    let mut report = VerificationReport {
        check_id: spec.check_id.clone(),
        parameters,
        residual: None,
        residuals: vec![],
        order: None,
        order_band: None,
        tolerance: spec.tolerance,
        pass: false,
        runtime_ms: 0,
        notes: vec![],
    };
    match result {
        Ok(o) => {
            let residual = finite(o.residual);
            let within = residual.is_some_and(|r| r <= spec.tolerance);
            let order_ok = match o.order_band {
                Some(band) => o.order.is_some_and(|v| band.contains(v)),
                None => true,
            };
            report.pass = within && order_ok && o.requirements.iter().all(|(_, ok)| *ok);
            report.residual = residual;
            report.residuals = o.residuals.into_iter().map(|v| if v.is_finite() { v } else { f64::MAX }).collect();
            report.order = o.order.and_then(finite);
            report.order_band = o.order_band;
            report.notes = o.notes;
            report.notes.extend(o.requirements.iter().filter(|(_, ok)| !ok).map(|(what, _)| format!("requirement failed: {what}")));
        }
        Err(e) => report.notes.push(format!("error: {e}")),
    }
    report.notes.extend(unused.into_iter().map(|k| format!("unused parameter: {k}")));
    report.runtime_ms = start.elapsed().as_millis() as u64;
    report
}

/// Overrides applied to every spec in a suite.
pub fn apply_overrides(specs: &mut [CheckSpec], overrides: &BTreeMap<String, serde_json::Value>, refinements: Option<usize>, tolerance: Option<f64>) {
    for s in specs {
        s.parameters.extend(overrides.iter().map(|(k, v)| (k.clone(), v.clone())));
        if let Some(r) = refinements {
            s.refinements = r;
        }
        if let Some(t) = tolerance {
            s.tolerance = t;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::Profile;
    use crate::error::LabError;

    #[test]
    fn empty_suite_passes() {
        let out = run_suite(&[], 1).unwrap();
        assert!(out.reports.is_empty());
        assert_eq!(out.exit_code(), 0);
    }

    #[test]
    fn unknown_check_is_rejected() {
        let spec = CheckSpec { check_id: "nope".into(), parameters: BTreeMap::new(), tolerance: 1.0, refinements: 1 };
        assert!(matches!(run_suite(&[spec], 1), Err(LabError::UnknownCheck(_))));
    }

    #[test]
    fn invalid_parameters_become_failing_reports() {
        let spec = CheckSpec::default_for("commutators", Profile::Default).unwrap().with_param("p_min", -1.0);
        let out = run_suite(&[spec], 1).unwrap();
        assert!(!out.reports[0].pass);
        assert!(out.reports[0].notes.iter().any(|n| n.starts_with("error:")));
        assert_eq!(out.exit_code(), 1);
    }

    #[test]
    fn seeds_are_per_check() {
        use rand::Rng;
        let a: u64 = check_rng(5, "spinors").random();
        let b: u64 = check_rng(5, "spinors").random();
        let c: u64 = check_rng(5, "flow").random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}

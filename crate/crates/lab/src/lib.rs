//! Verification suite and reports for `toa-core`.
//!
//! Every check is a named, parameterised run of one identity from the core
//! crate. [`run_suite`] executes a list of [`CheckSpec`]s and returns one
//! [`VerificationReport`] per spec in declaration order; [`emit_report`]
//! serialises them as versioned JSON or a plain table.

pub mod checks;
pub mod error;
pub mod params;
pub mod report;
pub mod suite;
pub mod tools;

pub use checks::{registry, CheckDef, Profile, DEFAULT_SUITE};
pub use error::{LabError, LabResult};
pub use report::{emit_report, CheckSpec, Format, OrderBand, ReportDocument, VerificationReport, SCHEMA_VERSION};
pub use suite::{run_suite, SuiteOutcome};

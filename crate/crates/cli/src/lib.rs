//! Command-line front end for `fraisse-core`: structure and age commands,
//! generic approximations, and the verification suites.

pub mod app;
pub mod report;
pub mod suites;

pub use app::{run, USAGE_ERROR};
pub use report::{emit_report, CheckResult, Format, Status, SuiteReport, SCHEMA_VERSION};
pub use suites::{run_suite, Ctx};

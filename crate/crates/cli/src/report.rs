//! Verification reports and their text and JSON forms.

use std::fmt::Write as _;

use fraisse_core::Budget;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Bumped whenever a field is added, removed or renamed.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// The budget ran out before the check could decide.
    Truncated,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Truncated => "TRUNCATED",
        }
    }

    /// Process exit code: 0 pass, 1 failure, 2 truncation.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Truncated => 2,
        }
    }

    /// Fail dominates truncated, which dominates pass.
    pub fn combine(self, other: Status) -> Status {
        match (self, other) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Truncated, _) | (_, Status::Truncated) => Status::Truncated,
            _ => Status::Pass,
        }
    }
}

/// Result of one check. Field order is the serialization order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub criterion: u8,
    pub name: String,
    pub claim: String,
    /// Exact checks admit no tolerance; the others report evidence.
    pub exact: bool,
    pub status: Status,
    pub summary: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verified_bound: Option<usize>,
    pub details: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub budget: Budget,
    pub status: Status,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64, budget: Budget, checks: Vec<CheckResult>) -> Self {
        let status = checks.iter().fold(Status::Pass, |s, c| s.combine(c.status));
        SuiteReport { schema_version: SCHEMA_VERSION, suite: suite.to_string(), seed, budget, status, checks }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Serializes a report. JSON output is pretty-printed with a trailing
/// newline; text output has one line per check.
pub fn emit_report(report: &SuiteReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            for c in &report.checks {
                let _ = writeln!(s, "[{}] {:>2} {}: {}", c.status.label(), c.criterion, c.name, c.summary);
                if let Some(note) = &c.note {
                    let _ = writeln!(s, "       note: {note}");
                }
            }
            let _ = writeln!(
                s,
                "suite {} seed {}: {} ({} checks)",
                report.suite,
                report.seed,
                report.status.label(),
                report.checks.len()
            );
            s
        }
    }
}

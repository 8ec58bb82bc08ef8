//! Report records and exit codes.

use std::time::Instant;

use grsk_core::{Error, Verdict};
use serde::{Deserialize, Serialize};

pub const REPORT_VERSION: u32 = 1;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// One check on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub check: String,
    /// The identity being checked.
    pub anchor: String,
    /// SHA-256 of the canonical instance file.
    pub instance: String,
    pub seed: u64,
    pub status: Status,
    pub exit_code: i32,
    pub lhs: String,
    pub rhs: String,
    /// `null` when infinite, as for a failed exact check.
    pub deviation: Option<f64>,
    pub counterexample: Option<String>,
    pub runtime_ms: f64,
}

/// Identifies the instance a record belongs to.
#[derive(Clone, Debug)]
pub struct Context {
    pub digest: String,
    pub seed: u64,
}

pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::OracleTooLarge { .. } | Error::DimensionGuard { .. } => EXIT_GUARD,
        Error::Quadrature(_) => EXIT_FAIL,
        Error::DomainMismatch(_) | Error::OutOfDomain { .. } | Error::EmptyPathSet | Error::InvalidInput(_) => EXIT_MALFORMED,
    }
}

impl Record {
    /// Runs `f`, timing it and translating its outcome.
    pub fn run(ctx: &Context, check: &str, anchor: &str, f: impl FnOnce() -> grsk_core::Result<Verdict>) -> Record {
        let start = Instant::now();
        let out = f();
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        let mut rec = match out {
            Ok(v) => Record::from_verdict(ctx, check, anchor, v),
            Err(e) => Record::from_error(ctx, check, anchor, &e),
        };
        rec.runtime_ms = runtime_ms;
        rec
    }

    pub fn from_verdict(ctx: &Context, check: &str, anchor: &str, v: Verdict) -> Record {
        Record {
            check: check.into(),
            anchor: anchor.into(),
            instance: ctx.digest.clone(),
            seed: ctx.seed,
            status: if v.holds { Status::Pass } else { Status::Fail },
            exit_code: if v.holds { EXIT_PASS } else { EXIT_FAIL },
            lhs: v.lhs,
            rhs: v.rhs,
            deviation: v.deviation.is_finite().then_some(v.deviation),
            counterexample: v.counterexample,
            runtime_ms: 0.0,
        }
    }

    pub fn from_error(ctx: &Context, check: &str, anchor: &str, e: &Error) -> Record {
        let code = error_code(e);
        Record {
            check: check.into(),
            anchor: anchor.into(),
            instance: ctx.digest.clone(),
            seed: ctx.seed,
            status: if code == EXIT_FAIL { Status::Fail } else { Status::Error },
            exit_code: code,
            lhs: String::new(),
            rhs: String::new(),
            deviation: None,
            counterexample: Some(e.to_string()),
            runtime_ms: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub version: u32,
    pub suite: String,
    pub tol: f64,
    pub inject_fault: bool,
    pub summary: Summary,
    pub exit_code: i32,
    /// Sorted by instance digest, then check name.
    pub records: Vec<Record>,
}

/// Malformed input outranks guard violations, which outrank failures.
pub fn combined_exit_code(records: &[Record]) -> i32 {
    [EXIT_MALFORMED, EXIT_GUARD, EXIT_FAIL]
        .into_iter()
        .find(|c| records.iter().any(|r| r.exit_code == *c))
        .unwrap_or(EXIT_PASS)
}

impl ReportFile {
    pub fn new(suite: &str, tol: f64, inject_fault: bool, mut records: Vec<Record>) -> Self {
        records.sort_by(|a, b| (&a.instance, &a.check).cmp(&(&b.instance, &b.check)));
        let count = |s: Status| records.iter().filter(|r| r.status == s).count();
        ReportFile {
            version: REPORT_VERSION,
            suite: suite.into(),
            tol,
            inject_fault,
            summary: Summary { passed: count(Status::Pass), failed: count(Status::Fail), errors: count(Status::Error) },
            exit_code: combined_exit_code(&records),
            records,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    /// One line per record plus a summary line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let status = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
            };
            out.push_str(&format!("{status:<5} {:<18} {} seed={:<6} lhs={} rhs={}", r.check, r.instance.get(..12).unwrap_or(&r.instance), r.seed, r.lhs, r.rhs));
            if let Some(c) = &r.counterexample {
                out.push_str(&format!("\n      {c}"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "{} passed, {} failed, {} errors; exit {}\n",
            self.summary.passed, self.summary.failed, self.summary.errors, self.exit_code
        ));
        out
    }
}

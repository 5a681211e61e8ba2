//! Verification reports: named checks with pass/fail/skipped status and witnesses.

use std::fmt;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalars::Field;
use crate::tensorops::TensorOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        })
    }
}

/// Outcome of a single check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(String),
    Skip(String),
}

impl Verdict {
    pub fn from_bool(ok: bool, witness: impl FnOnce() -> String) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail(witness())
        }
    }

    /// Exact operator equality, with up to five differing entries as witness.
    pub fn ops<S: Field>(lhs: &TensorOperator<S>, rhs: &TensorOperator<S>) -> Self {
        match lhs.diff_witness(rhs, 5) {
            None => Verdict::Pass,
            Some(w) => Verdict::Fail(w),
        }
    }

    pub fn scalars<S: Field>(lhs: &S, rhs: &S) -> Self {
        Verdict::from_bool(lhs == rhs, || format!("lhs {lhs} rhs {rhs}"))
    }

    /// All verdicts must pass; the first failure is reported.
    pub fn all(vs: impl IntoIterator<Item = Verdict>) -> Self {
        let mut skip = None;
        for v in vs {
            match v {
                Verdict::Pass => {}
                Verdict::Fail(_) => return v,
                Verdict::Skip(r) => skip = Some(r),
            }
        }
        skip.map_or(Verdict::Pass, Verdict::Skip)
    }

    /// Errors become failures, except inadmissible parameters and degrees beyond the reducer,
    /// which become skips.
    pub fn from_result(r: Result<Verdict>) -> Self {
        match r {
            Ok(v) => v,
            Err(Error::Inadmissible(i)) => Verdict::Skip(i.to_string()),
            Err(e @ Error::DegreeOverflow(..)) => Verdict::Skip(e.to_string()),
            Err(e) => Verdict::Fail(e.to_string()),
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    /// Prefixes a failure witness with context.
    pub fn context(self, ctx: &str) -> Self {
        match self {
            Verdict::Fail(w) => Verdict::Fail(format!("{ctx}: {w}")),
            v => v,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckRecord {
    pub suite: String,
    pub check: String,
    pub paper_ref: String,
    pub params: Value,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub elapsed_ms: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

/// An ordered list of check records. Order is the order in which checks were recorded.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn extend(&mut self, other: Report) {
        self.records.extend(other.records);
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary {
            total: self.records.len(),
            ..Summary::default()
        };
        for r in &self.records {
            match r.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Skipped => s.skipped += 1,
            }
        }
        s
    }

    pub fn passed(&self) -> bool {
        self.summary().fail == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn find(&self, check: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.check == check)
    }

    /// Zeroes all timings, for byte-level comparison of reruns.
    pub fn without_timings(&self) -> Report {
        let mut r = self.clone();
        for rec in &mut r.records {
            rec.elapsed_ms = 0;
        }
        r
    }

    /// One JSON object per line: header, records, summary.
    pub fn to_jsonl(&self, header: &Value) -> String {
        let mut out = String::new();
        out.push_str(&header.to_string());
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out.push_str(&json!({ "summary": self.summary() }).to_string());
        out.push('\n');
        out
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.records {
            write!(f, "[{}] {}/{}", r.status, r.suite, r.check)?;
            if let Some(w) = &r.witness {
                write!(f, ": {w}")?;
            }
            if let Some(w) = &r.reason {
                write!(f, ": {w}")?;
            }
            writeln!(f)?;
        }
        let s = self.summary();
        writeln!(
            f,
            "{} checks: {} pass, {} fail, {} skipped",
            s.total, s.pass, s.fail, s.skipped
        )
    }
}

/// Records checks for one suite under fixed parameters.
pub struct Recorder {
    suite: String,
    params: Value,
    report: Report,
}

impl Recorder {
    pub fn new(suite: &str, params: Value) -> Self {
        Recorder {
            suite: suite.to_string(),
            params,
            report: Report::new(),
        }
    }

    /// Runs `f`, timing it, and records the verdict. Errors inside `f` are converted with
    /// [`Verdict::from_result`].
    pub fn check(
        &mut self,
        name: &str,
        paper_ref: &str,
        f: impl FnOnce() -> Result<Verdict>,
    ) -> Verdict {
        let start = Instant::now();
        let v = Verdict::from_result(f());
        let elapsed_ms = start.elapsed().as_millis() as u64;
        self.push(name, paper_ref, v.clone(), elapsed_ms);
        v
    }

    pub fn push(&mut self, name: &str, paper_ref: &str, v: Verdict, elapsed_ms: u64) {
        let (status, witness, reason) = match v {
            Verdict::Pass => (Status::Pass, None, None),
            Verdict::Fail(w) => (Status::Fail, Some(w), None),
            Verdict::Skip(r) => (Status::Skipped, None, Some(r)),
        };
        self.report.records.push(CheckRecord {
            suite: self.suite.clone(),
            check: name.to_string(),
            paper_ref: paper_ref.to_string(),
            params: self.params.clone(),
            status,
            witness,
            reason,
            elapsed_ms,
        });
    }

    pub fn skip(&mut self, name: &str, paper_ref: &str, reason: impl Into<String>) {
        self.push(name, paper_ref, Verdict::Skip(reason.into()), 0);
    }

    pub fn finish(self) -> Report {
        self.report
    }
}

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Noted but not counted as a failure.
    Flagged,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub residual: f64,
    pub detail: String,
}

impl Check {
    pub fn new(
        name: impl Into<String>,
        status: CheckStatus,
        residual: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            status,
            residual,
            detail: detail.into(),
        }
    }

    /// Pass iff `ok`.
    pub fn from_bool(name: impl Into<String>, ok: bool, residual: f64, detail: impl Into<String>) -> Self {
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        Self::new(name, status, residual, detail)
    }

    /// Pass iff `bad` is empty; the residual is the failure count.
    pub fn tally(name: impl Into<String>, bad: Vec<String>, total: usize) -> Self {
        let detail = if bad.is_empty() {
            format!("{total} checked")
        } else {
            let shown: Vec<_> = bad.iter().take(6).cloned().collect();
            format!("{}/{total} failed: {}", bad.len(), shown.join("; "))
        };
        Self::from_bool(name, bad.is_empty(), bad.len() as f64, detail)
    }

    /// Pass iff `residual <= tol`.
    pub fn within(name: impl Into<String>, residual: f64, tol: f64, detail: impl Into<String>) -> Self {
        Self::from_bool(name, residual <= tol, residual, detail)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: String,
    pub checks: Vec<Check>,
    /// Wall-clock time; left out of serialized output so reports are
    /// reproducible byte for byte.
    #[serde(skip)]
    pub elapsed_ms: f64,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        Self {
            subject: subject.into(),
            checks: Vec::new(),
            elapsed_ms: 0.0,
        }
    }

    /// Runs `f` against a fresh report and records its duration.
    pub fn timed(subject: impl Into<String>, f: impl FnOnce(&mut Self)) -> Self {
        let start = Instant::now();
        let mut report = Self::new(subject);
        f(&mut report);
        report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        report
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// Appends another report's checks with their names prefixed.
    pub fn absorb(&mut self, prefix: &str, other: VerificationReport) {
        for mut c in other.checks {
            c.name = format!("{prefix}: {}", c.name);
            self.checks.push(c);
        }
        self.elapsed_ms += other.elapsed_ms;
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn status(&self) -> CheckStatus {
        if self.passed() {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }

    pub fn flagged(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Flagged)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "subject": self.subject,
            "status": self.status(),
            "checks": self.checks,
        })
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status() {
            CheckStatus::Pass => "PASS",
            _ => "FAIL",
        };
        writeln!(f, "{} [{status}]", self.subject)?;
        for c in &self.checks {
            let tag = match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Flagged => "flag",
            };
            write!(f, "  {tag:4}  {}  (residual {:.3e})", c.name, c.residual)?;
            if !c.detail.is_empty() {
                write!(f, "  {}", c.detail)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

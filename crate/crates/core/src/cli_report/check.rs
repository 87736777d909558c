//! Individual checks and per-suite results.

use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::time::Duration;

/// Where the expected value of a check comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// A closed-form constant of the geometry.
    PaperConstant,
    /// An independent computation of the same quantity.
    DerivedOracle,
    /// A value fixed by construction.
    TrivialIdentity,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::PaperConstant => "paper-constant",
            Provenance::DerivedOracle => "derived-oracle",
            Provenance::TrivialIdentity => "trivial-identity",
        }
    }
}

/// Failing a `Warning` check does not fail the suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Required,
    Warning,
}

/// How `computed` is compared with `expected`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|computed − expected| ≤ tolerance`.
    Absolute,
    /// `|computed − expected| ≤ tolerance · |expected|`.
    Relative,
    /// `computed ≤ expected + tolerance`.
    UpperBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub expected: f64,
    /// `None` when the computation failed; see `note`.
    pub computed: Option<f64>,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub passed: bool,
    pub provenance: Provenance,
    pub severity: Severity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn build(
        id: &str,
        expected: f64,
        computed: Result<f64>,
        tolerance: f64,
        comparison: Comparison,
        provenance: Provenance,
    ) -> Self {
        let (computed, note) = match computed {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let mut check = Check {
            id: id.to_string(),
            expected,
            computed,
            tolerance,
            comparison,
            passed: false,
            provenance,
            severity: Severity::Required,
            note,
        };
        check.evaluate();
        check
    }

    pub fn absolute(
        id: &str,
        expected: f64,
        computed: Result<f64>,
        tolerance: f64,
        provenance: Provenance,
    ) -> Self {
        Self::build(
            id,
            expected,
            computed,
            tolerance,
            Comparison::Absolute,
            provenance,
        )
    }

    pub fn relative(
        id: &str,
        expected: f64,
        computed: Result<f64>,
        tolerance: f64,
        provenance: Provenance,
    ) -> Self {
        Self::build(
            id,
            expected,
            computed,
            tolerance,
            Comparison::Relative,
            provenance,
        )
    }

    /// A residual that must not exceed `tolerance`.
    pub fn residual(
        id: &str,
        computed: Result<f64>,
        tolerance: f64,
        provenance: Provenance,
    ) -> Self {
        Self::build(
            id,
            0.0,
            computed,
            tolerance,
            Comparison::Absolute,
            provenance,
        )
    }

    /// `computed ≤ bound`.
    pub fn upper_bound(
        id: &str,
        bound: f64,
        computed: Result<f64>,
        provenance: Provenance,
    ) -> Self {
        Self::build(id, bound, computed, 0.0, Comparison::UpperBound, provenance)
    }

    pub fn warning(mut self) -> Self {
        self.severity = Severity::Warning;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        self.note = Some(match self.note.take() {
            Some(old) => format!("{old}; {note}"),
            None => note,
        });
        self
    }

    /// Recomputes `passed`, for example after a tolerance override.
    pub fn evaluate(&mut self) {
        self.passed = match self.computed {
            Some(c) if c.is_finite() => {
                let diff = (c - self.expected).abs();
                match self.comparison {
                    Comparison::Absolute => diff <= self.tolerance,
                    Comparison::Relative => diff <= self.tolerance * self.expected.abs(),
                    Comparison::UpperBound => c <= self.expected + self.tolerance,
                }
            }
            _ => false,
        };
    }

    /// Fails only if required.
    pub fn blocking(&self) -> bool {
        !self.passed && self.severity == Severity::Required
    }

    /// One human-readable line.
    pub fn line(&self) -> String {
        let status = match (self.passed, self.severity) {
            (true, _) => "PASS",
            (false, Severity::Required) => "FAIL",
            (false, Severity::Warning) => "WARN",
        };
        let computed = self
            .computed
            .map_or_else(|| "error".to_string(), |c| format!("{c:.10e}"));
        let rel = match self.comparison {
            Comparison::Absolute => "abs",
            Comparison::Relative => "rel",
            Comparison::UpperBound => "<=",
        };
        let mut s = format!(
            "{status} {} expected={:.10e} computed={computed} tol={:.1e} ({rel}) [{}]",
            self.id,
            self.expected,
            self.tolerance,
            self.provenance.name()
        );
        if let Some(note) = &self.note {
            s.push_str(&format!(" note: {note}"));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: String,
    pub checks: Vec<Check>,
    /// Wall-clock time; left out of reports unless timings are requested.
    #[serde(skip)]
    pub duration: Duration,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        !self.checks.iter().any(Check::blocking)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.blocking())
    }

    pub fn find(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }
}

/// Runs `f` and records its checks with the elapsed time.
pub fn timed(suite: &str, f: impl FnOnce() -> Result<Vec<Check>>) -> Result<SuiteResult> {
    let start = std::time::Instant::now();
    let checks = f()?;
    Ok(SuiteResult {
        suite: suite.to_string(),
        checks,
        duration: start.elapsed(),
    })
}

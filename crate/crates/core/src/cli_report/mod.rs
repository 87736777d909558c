//! Verification suites, reports and exit codes behind the `ale-lab` binary.
//!
//! Every check carries a stable id; the README lists them with their
//! expected values. Reports are deterministic: timings are only included
//! on request.

pub mod asympt;
pub mod check;
pub mod deformation;
pub mod geometry;
pub mod obstruction;

pub use asympt::{asympt_csv, asympt_rows, validate_radii, AsymptRow, CSV_HEADER};
pub use check::{timed, Check, Comparison, Provenance, Severity, SuiteResult};
pub use deformation::deformation_checks;
pub use geometry::{
    gh_constant_checks, gh_geometry_checks, harmonic_checks, quadrature_checks, validate_family,
};
pub use obstruction::{d_invariant_checks, obstruction_checks};

use crate::error::{AleError, Result};
use crate::obstruction::SCHEMA_VERSION;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Quadrature,
    Gh,
    Harmonic,
    Deformation,
    Obstruction,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = [
        "quadrature",
        "gh",
        "harmonic",
        "deformation",
        "obstruction",
        "all",
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Quadrature => "quadrature",
            Suite::Gh => "gh",
            Suite::Harmonic => "harmonic",
            Suite::Deformation => "deformation",
            Suite::Obstruction => "obstruction",
            Suite::All => "all",
        }
    }

    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Quadrature,
                Suite::Gh,
                Suite::Harmonic,
                Suite::Deformation,
                Suite::Obstruction,
            ],
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = AleError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "quadrature" => Suite::Quadrature,
            "gh" => Suite::Gh,
            "harmonic" => Suite::Harmonic,
            "deformation" => Suite::Deformation,
            "obstruction" => Suite::Obstruction,
            "all" => Suite::All,
            other => {
                return Err(AleError::InvalidConfig(format!(
                    "unknown suite {other:?}; expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

/// Replacement tolerance for the checks whose id equals `pattern`, or
/// starts with it when `pattern` ends in `*`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TolOverride {
    pub pattern: String,
    pub tolerance: f64,
}

impl TolOverride {
    fn matches(&self, id: &str) -> bool {
        match self.pattern.strip_suffix('*') {
            Some(prefix) => id.starts_with(prefix),
            None => id == self.pattern,
        }
    }
}

impl FromStr for TolOverride {
    type Err = AleError;

    /// Parses `ID=VALUE`.
    fn from_str(s: &str) -> Result<Self> {
        let bad =
            || AleError::InvalidConfig(format!("tolerance override {s:?} must look like ID=VALUE"));
        let (pattern, value) = s.split_once('=').ok_or_else(bad)?;
        let tolerance: f64 = value.trim().parse().map_err(|_| bad())?;
        if pattern.trim().is_empty() || !(tolerance >= 0.0 && tolerance.is_finite()) {
            return Err(bad());
        }
        Ok(TolOverride {
            pattern: pattern.trim().to_string(),
            tolerance,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub k: u32,
    pub lambda: f64,
    pub suite: Suite,
    pub tol_overrides: Vec<TolOverride>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            k: 1,
            lambda: 1.0,
            suite: Suite::All,
            tol_overrides: Vec::new(),
        }
    }
}

/// Checks of one suite at `(k, λ)`.
pub fn suite_checks(suite: Suite, k: u32, lambda: f64) -> Result<Vec<Check>> {
    validate_family(k, lambda)?;
    match suite {
        Suite::Quadrature => Ok(quadrature_checks()),
        Suite::Gh => {
            let mut checks = gh_constant_checks(k, lambda)?;
            checks.extend(gh_geometry_checks(k, lambda)?);
            Ok(checks)
        }
        Suite::Harmonic => harmonic_checks(k, lambda),
        Suite::Deformation => deformation_checks(k, lambda),
        Suite::Obstruction => {
            let mut checks = obstruction_checks(k, lambda)?;
            checks.extend(d_invariant_checks());
            Ok(checks)
        }
        Suite::All => Err(AleError::InvalidConfig(
            "\"all\" is not a single suite".into(),
        )),
    }
}

/// Runs the selected suites. Errors are configuration errors; failed
/// checks are reported in the results.
pub fn run_verify(opts: &VerifyOptions) -> Result<Vec<SuiteResult>> {
    validate_family(opts.k, opts.lambda)?;
    let mut results = opts
        .suite
        .members()
        .into_iter()
        .map(|s| timed(s.name(), || suite_checks(s, opts.k, opts.lambda)))
        .collect::<Result<Vec<_>>>()?;
    apply_overrides(&mut results, &opts.tol_overrides)?;
    Ok(results)
}

/// Applies tolerance overrides; a pattern matching no check is an error.
pub fn apply_overrides(results: &mut [SuiteResult], overrides: &[TolOverride]) -> Result<()> {
    for o in overrides {
        let mut hit = false;
        for check in results.iter_mut().flat_map(|r| r.checks.iter_mut()) {
            if o.matches(&check.id) {
                check.tolerance = o.tolerance;
                check.evaluate();
                hit = true;
            }
        }
        if !hit {
            return Err(AleError::InvalidConfig(format!(
                "tolerance override {:?} matches no check",
                o.pattern
            )));
        }
    }
    Ok(())
}

pub fn verify_exit_code(results: &[SuiteResult]) -> i32 {
    if results.iter().all(SuiteResult::passed) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

/// Exit code for an error raised before or instead of a result.
pub fn error_exit_code(err: &AleError) -> i32 {
    match err {
        AleError::InvalidConfig(_)
        | AleError::SchemaError { .. }
        | AleError::SymmetryError(_)
        | AleError::MissingConstants => EXIT_CONFIG,
        _ => EXIT_CHECK_FAILED,
    }
}

#[derive(Serialize)]
struct SuiteEntry<'a> {
    suite: &'a str,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    duration_seconds: Option<f64>,
    checks: &'a [Check],
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    schema_version: u32,
    k: u32,
    lambda: f64,
    suite: Suite,
    tol_overrides: &'a [TolOverride],
    passed: bool,
    suites: Vec<SuiteEntry<'a>>,
}

/// Pretty JSON report. Without `timings` it is identical across runs.
pub fn verify_report_json(opts: &VerifyOptions, results: &[SuiteResult], timings: bool) -> String {
    let report = VerifyReport {
        schema_version: SCHEMA_VERSION,
        k: opts.k,
        lambda: opts.lambda,
        suite: opts.suite,
        tol_overrides: &opts.tol_overrides,
        passed: verify_exit_code(results) == EXIT_OK,
        suites: results
            .iter()
            .map(|r| SuiteEntry {
                suite: &r.suite,
                passed: r.passed(),
                duration_seconds: timings.then_some(r.duration.as_secs_f64()),
                checks: &r.checks,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&report).expect("report serializes")
}

/// Human-readable lines for each check and a closing line per suite.
pub fn verify_text(results: &[SuiteResult]) -> String {
    let mut out = String::new();
    for r in results {
        for c in &r.checks {
            out.push_str(&c.line());
            out.push('\n');
        }
        let failed = r.failures().count();
        out.push_str(&format!(
            "suite {}: {} ({} checks, {} failed, {:.2} s)\n",
            r.suite,
            if r.passed() { "PASS" } else { "FAIL" },
            r.checks.len(),
            failed,
            r.duration.as_secs_f64()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_roundtrip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().name(), name);
        }
        assert!(matches!(
            "nope".parse::<Suite>(),
            Err(AleError::InvalidConfig(_))
        ));
    }

    #[test]
    fn tolerance_override_parsing() {
        let o: TolOverride = "gh.ricci_max=1e-4".parse().unwrap();
        assert_eq!(
            o,
            TolOverride {
                pattern: "gh.ricci_max".into(),
                tolerance: 1e-4
            }
        );
        assert!(o.matches("gh.ricci_max") && !o.matches("gh.ricci_max2"));
        let p: TolOverride = "gh.*=0.5".parse().unwrap();
        assert!(p.matches("gh.vol_sigma"));
        for bad in ["gh.x", "=1", "a=-1", "a=x", "a=inf"] {
            assert!(bad.parse::<TolOverride>().is_err(), "{bad}");
        }
    }

    #[test]
    fn overrides_reevaluate_and_reject_unknown_ids() {
        let mut results = vec![SuiteResult {
            suite: "s".into(),
            checks: vec![Check::residual(
                "s.a",
                Ok(1e-3),
                1e-4,
                Provenance::TrivialIdentity,
            )],
            duration: Default::default(),
        }];
        assert_eq!(verify_exit_code(&results), EXIT_CHECK_FAILED);
        apply_overrides(&mut results, &["s.a=1e-2".parse().unwrap()]).unwrap();
        assert_eq!(verify_exit_code(&results), EXIT_OK);
        assert!(apply_overrides(&mut results, &["t.*=1".parse().unwrap()]).is_err());
    }

    #[test]
    fn invalid_family_is_a_config_error() {
        let opts = VerifyOptions {
            k: 0,
            ..Default::default()
        };
        assert_eq!(
            error_exit_code(&run_verify(&opts).unwrap_err()),
            EXIT_CONFIG
        );
        let opts = VerifyOptions {
            lambda: -1.0,
            ..Default::default()
        };
        assert_eq!(
            error_exit_code(&run_verify(&opts).unwrap_err()),
            EXIT_CONFIG
        );
    }

    #[test]
    fn quadrature_suite_passes_and_reports_deterministically() {
        let opts = VerifyOptions {
            suite: Suite::Quadrature,
            ..Default::default()
        };
        let a = run_verify(&opts).unwrap();
        assert_eq!(verify_exit_code(&a), EXIT_OK);
        assert!(a[0]
            .find("quadrature.s3_moment_pi2_over_6")
            .is_some_and(|c| c.passed));
        let b = run_verify(&opts).unwrap();
        assert_eq!(
            verify_report_json(&opts, &a, false),
            verify_report_json(&opts, &b, false)
        );
        assert!(verify_report_json(&opts, &a, true).contains("duration_seconds"));
        assert!(!verify_report_json(&opts, &a, false).contains("duration_seconds"));
    }
}

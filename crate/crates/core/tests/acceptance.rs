//! Acceptance run: one line per criterion with its runtime limit. Exits
//! nonzero if any required check fails or a criterion exceeds its limit.

use ale_core::cli_report::{
    d_invariant_checks, deformation_checks, gh_constant_checks, gh_geometry_checks,
    harmonic_checks, obstruction_checks, quadrature_checks, Check, Severity,
};
use ale_core::Result;
use std::process::ExitCode;
use std::time::{Duration, Instant};

struct Criterion {
    number: u32,
    title: &'static str,
    limit: Duration,
    run: fn() -> Result<Vec<Check>>,
}

fn grid_constants() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for k in 1..=3 {
        for lambda in [0.5, 1.0, 2.0] {
            out.extend(tag(
                gh_constant_checks(k, lambda)?,
                &format!("k={k},lambda={lambda}"),
            ));
        }
    }
    Ok(out)
}

fn per_k(f: fn(u32, f64) -> Result<Vec<Check>>) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for k in 1..=3 {
        out.extend(tag(f(k, 1.0)?, &format!("k={k}")));
    }
    Ok(out)
}

fn tag(checks: Vec<Check>, label: &str) -> Vec<Check> {
    checks
        .into_iter()
        .map(|mut c| {
            c.id = format!("{}[{label}]", c.id);
            c
        })
        .collect()
}

const CRITERIA: [Criterion; 7] = [
    Criterion {
        number: 1,
        title: "sigma constants by quadrature",
        limit: Duration::from_secs(30),
        run: grid_constants,
    },
    Criterion {
        number: 2,
        title: "S3 identities",
        limit: Duration::from_secs(10),
        run: || Ok(quadrature_checks()),
    },
    Criterion {
        number: 3,
        title: "GH geometry",
        limit: Duration::from_secs(60),
        run: || per_k(gh_geometry_checks),
    },
    Criterion {
        number: 4,
        title: "harmonic form",
        limit: Duration::from_secs(120),
        run: || per_k(harmonic_checks),
    },
    Criterion {
        number: 5,
        title: "obstruction pipeline",
        limit: Duration::from_secs(60),
        run: || per_k(obstruction_checks),
    },
    Criterion {
        number: 6,
        title: "deformation formalism",
        limit: Duration::from_secs(60),
        run: || Ok(tag(deformation_checks(2, 1.0)?, "k=2")),
    },
    Criterion {
        number: 7,
        title: "D invariant",
        limit: Duration::from_secs(60),
        run: || Ok(d_invariant_checks()),
    },
];

fn main() -> ExitCode {
    let verbose = std::env::args().any(|a| a == "--verbose");
    let mut all_ok = true;
    for c in &CRITERIA {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.limit;
        let (ok, detail) = match &outcome {
            Ok(checks) => {
                let failed: Vec<&Check> = checks.iter().filter(|x| x.blocking()).collect();
                let warned = checks
                    .iter()
                    .filter(|x| !x.passed && x.severity == Severity::Warning)
                    .count();
                for x in checks.iter().filter(|x| verbose || !x.passed) {
                    println!("    {}", x.line());
                }
                (
                    failed.is_empty(),
                    format!(
                        "{} checks, {} failed, {} warnings",
                        checks.len(),
                        failed.len(),
                        warned
                    ),
                )
            }
            Err(e) => (false, format!("error: {e}")),
        };
        let pass = ok && in_time;
        all_ok &= pass;
        println!(
            "criterion {} ({}): {} [{}; {:.2} s of {} s limit{}]",
            c.number,
            c.title,
            if pass { "PASS" } else { "FAIL" },
            detail,
            elapsed.as_secs_f64(),
            c.limit.as_secs(),
            if in_time { "" } else { ", over limit" }
        );
    }
    if all_ok {
        println!("acceptance: PASS");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAIL");
        ExitCode::FAILURE
    }
}

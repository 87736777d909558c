//! `ale-lab`: verification suites, obstruction reports and asymptotic series.
//!
//! Exit codes: 0 success, 1 failed checks or computation errors, 2
//! configuration or input errors. `ALE_LAB_THREADS` caps worker threads.

use ale_core::cli_report::{
    asympt_csv, asympt_rows, error_exit_code, run_verify, verify_exit_code, verify_report_json,
    verify_text, Suite, TolOverride, VerifyOptions, EXIT_CONFIG, EXIT_OK,
};
use ale_core::obstruction::{obstruction_report, ObstructionInput};
use ale_core::AleError;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ale-lab",
    version,
    about = "Numerical checks on A_k gravitational instantons and orbifold obstructions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and print one line per check.
    Verify {
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        lambda: f64,
        /// quadrature, gh, harmonic, deformation, obstruction or all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Tolerance override `ID=VALUE`; `ID` may end in `*` to match a prefix. Repeatable.
        #[arg(long = "tol", value_name = "ID=VALUE")]
        tol: Vec<String>,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Include wall-clock durations in the JSON report.
        #[arg(long)]
        timings: bool,
    },
    /// Compute the obstruction report for a metric jet given as JSON.
    Obstruct {
        #[arg(long)]
        jet: PathBuf,
        /// Also write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print far-field decay data as CSV.
    Asympt {
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        lambda: f64,
        /// Comma-separated asymptotic radii.
        #[arg(long, value_delimiter = ',', num_args = 0.., allow_negative_numbers = true)]
        radii: Vec<f64>,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn fail(err: &AleError) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(error_exit_code(err) as u8)
}

fn write(path: &PathBuf, text: &str) -> Result<(), ExitCode> {
    std::fs::write(path, text).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        ExitCode::from(EXIT_CONFIG as u8)
    })
}

fn verify(
    k: u32,
    lambda: f64,
    suite: &str,
    tol: &[String],
    report: Option<PathBuf>,
    timings: bool,
) -> ExitCode {
    let parsed = suite.parse::<Suite>().and_then(|suite| {
        let tol_overrides = tol
            .iter()
            .map(|t| t.parse::<TolOverride>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VerifyOptions {
            k,
            lambda,
            suite,
            tol_overrides,
        })
    });
    let opts = match parsed {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    let results = match run_verify(&opts) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    print!("{}", verify_text(&results));
    if let Some(path) = report {
        if let Err(code) = write(&path, &verify_report_json(&opts, &results, timings)) {
            return code;
        }
    }
    ExitCode::from(verify_exit_code(&results) as u8)
}

fn obstruct(jet: &PathBuf, report: Option<PathBuf>) -> ExitCode {
    let text = match std::fs::read_to_string(jet) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", jet.display());
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let result = ObstructionInput::from_json(&text).and_then(|input| obstruction_report(&input));
    let rep = match result {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let json = serde_json::to_string_pretty(&rep).expect("report serializes");
    println!("{json}");
    eprintln!("{}", rep.summary());
    if let Some(path) = report {
        if let Err(code) = write(&path, &json) {
            return code;
        }
    }
    ExitCode::from(EXIT_OK as u8)
}

fn asympt(k: u32, lambda: f64, radii: &[f64], out: Option<PathBuf>) -> ExitCode {
    let rows = match asympt_rows(k, lambda, radii) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let csv = asympt_csv(&rows);
    match out {
        Some(path) => {
            if let Err(code) = write(&path, &csv) {
                return code;
            }
        }
        None => print!("{csv}"),
    }
    ExitCode::from(EXIT_OK as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match cli.command {
        Command::Verify {
            k,
            lambda,
            suite,
            tol,
            report,
            timings,
        } => verify(k, lambda, &suite, &tol, report, timings),
        Command::Obstruct { jet, report } => obstruct(&jet, report),
        Command::Asympt {
            k,
            lambda,
            radii,
            out,
        } => asympt(k, lambda, &radii, out),
    }
}

use ale_core::exterior_calculus::CurvatureBlock;
use ale_core::obstruction::{with_rplus, Jet2, ObstructionInput};
use serde_json::Value;
use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ale-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn find_check<'a>(report: &'a Value, id: &str) -> &'a Value {
    report["suites"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|s| s["checks"].as_array().unwrap())
        .find(|c| c["id"] == id)
        .unwrap_or_else(|| panic!("no check {id}"))
}

fn verify_report(dir: &Path, args: &[&str]) -> (Output, Value) {
    let path = dir.join("report.json");
    let mut all = vec!["verify"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--report", path.to_str().unwrap()]);
    let out = run(&all);
    let report = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    (out, report)
}

#[test]
fn quadrature_suite_includes_the_quartic_moment() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report) = verify_report(
        dir.path(),
        &["--k", "1", "--lambda", "1", "--suite", "quadrature"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let check = find_check(&report, "quadrature.s3_moment_pi2_over_6");
    assert!((check["expected"].as_f64().unwrap() - PI * PI / 6.0).abs() < 1e-15);
    assert_eq!(check["passed"], true);
    assert_eq!(check["provenance"], "paper-constant");
    assert_eq!(report["schema_version"], 1);
}

#[test]
fn gh_suite_checks_vol_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report) = verify_report(dir.path(), &["--k", "2", "--suite", "gh"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let check = find_check(&report, "gh.vol_sigma");
    assert!((check["expected"].as_f64().unwrap() - 6.0 * PI).abs() < 1e-12);
    assert_eq!(check["passed"], true);
}

#[test]
fn harmonic_suite_checks_the_norm() {
    let dir = tempfile::tempdir().unwrap();
    let (out, report) = verify_report(dir.path(), &["--k", "1", "--suite", "harmonic"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let check = find_check(&report, "harmonic.omega_norm_sq");
    assert!((check["expected"].as_f64().unwrap() - 8.0 * PI * PI).abs() < 1e-12);
    assert_eq!(check["passed"], true);
}

#[test]
fn verify_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--k", "2", "--suite", "deformation"];
    let (_, _) = verify_report(dir.path(), &args);
    let first = std::fs::read(dir.path().join("report.json")).unwrap();
    let (_, _) = verify_report(dir.path(), &args);
    assert_eq!(
        first,
        std::fs::read(dir.path().join("report.json")).unwrap()
    );
}

#[test]
fn verify_exit_codes() {
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(
        run(&["verify", "--k", "0", "--suite", "quadrature"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["verify", "--lambda", "-1", "--suite", "quadrature"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["verify", "--suite", "quadrature", "--tol", "bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["verify", "--suite", "quadrature", "--tol", "gh.*=1"])
            .status
            .code(),
        Some(2)
    );
    let strict = run(&[
        "verify",
        "--suite",
        "quadrature",
        "--tol",
        "quadrature.s3_moment_*=0",
    ]);
    assert_eq!(strict.status.code(), Some(1), "{}", stdout(&strict));
    assert!(stdout(&strict).contains("FAIL quadrature.s3_moment"));
}

fn write_input(dir: &Path, input: &ObstructionInput) -> String {
    let path = dir.join("jet.json");
    std::fs::write(&path, input.to_json()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn obstruct_zero_jet_is_on_the_wall() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_input(dir.path(), &ObstructionInput::new(1, 1.0, Jet2::zero()));
    let out = run(&["obstruct", "--jet", &path]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["lambda"], serde_json::json!([0.0, 0.0, 0.0]));
    assert_eq!(report["wall_side"], "on_wall");
    assert!(stderr(&out).contains("wall side: on_wall"));
}

#[test]
fn obstruct_canonical_example_gives_mu1_four() {
    let dir = tempfile::tempdir().unwrap();
    let block = CurvatureBlock {
        rplus: [[0.0; 3], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        ..CurvatureBlock::zero()
    };
    let mut input = ObstructionInput::new(1, 1.0, with_rplus(&Jet2::random(3, 1.0), &block.rplus));
    input.gauge_project = true;
    let path = write_input(dir.path(), &input);
    let out = run(&["obstruct", "--jet", &path]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((report["mu1"].as_f64().unwrap() - 4.0).abs() < 1e-6);
    assert!((report["minor"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let again = run(&["obstruct", "--jet", &path]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn obstruct_rejects_asymmetric_jets_with_a_path() {
    let dir = tempfile::tempdir().unwrap();
    let mut text: Value =
        serde_json::from_str(&ObstructionInput::new(1, 1.0, Jet2::zero()).to_json()).unwrap();
    text["H"][0][1][2][3] = Value::from(1.0);
    let path = dir.path().join("bad.json");
    std::fs::write(&path, text.to_string()).unwrap();
    let out = run(&["obstruct", "--jet", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("schema error at H["),
        "{}",
        stderr(&out)
    );
    let missing = run(&[
        "obstruct",
        "--jet",
        dir.path().join("absent.json").to_str().unwrap(),
    ]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn obstruct_surfaces_a_nonzero_first_row_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let mut input = ObstructionInput::new(1, 1.0, Jet2::random(5, 1.0));
    input.require_higher_order = true;
    let path = write_input(dir.path(), &input);
    let out = run(&["obstruct", "--jet", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("first obstruction does not vanish"));
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn asympt_k2_c_gamma_approaches_nine() {
    let out = run(&[
        "asympt",
        "--k",
        "2",
        "--lambda",
        "1",
        "--radii",
        "30,60,120,240",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("r,metric_deviation,moment_deviation,c_gamma_estimate"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 4);
    let c: f64 = rows[3][3].parse().unwrap();
    assert!((c / 9.0 - 1.0).abs() < 1e-2, "{c}");
    assert_eq!(
        run(&["asympt", "--k", "2", "--radii", "30,60,120,240"]).stdout,
        out.stdout
    );
}

#[test]
fn asympt_k1_metric_exponent() {
    let out = run(&["asympt", "--k", "1", "--radii", "20,40,80"]);
    let rows = csv_rows(&stdout(&out));
    let exponent: f64 = rows[0][4].parse().unwrap();
    assert!(exponent <= -3.9, "{exponent}");
    assert!(rows.iter().all(|r| r[6].is_empty()));
}

#[test]
fn asympt_flags_and_errors() {
    assert_eq!(run(&["asympt", "--k", "1"]).status.code(), Some(2));
    assert_eq!(
        run(&["asympt", "--k", "1", "--radii", "-5"]).status.code(),
        Some(2)
    );
    let single = run(&["asympt", "--k", "1", "--radii", "50"]);
    assert_eq!(single.status.code(), Some(0));
    assert_eq!(csv_rows(&stdout(&single))[0][6], "fit_unstable");
}

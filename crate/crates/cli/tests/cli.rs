use std::path::PathBuf;
use std::process::Command;

use delta_ineq::harness::{Outcome, SuiteReport};
use delta_ineq_cli::{run, CliError, EvalReport, CSV_HEADER, CSV_VERSION_LINE};

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn worked() -> String {
    configs().join("worked_example.json").display().to_string()
}

fn capture(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let argv = std::iter::once("delta-ineq").chain(args.iter().copied());
    let code = run(argv, &mut out).unwrap();
    (code, String::from_utf8(out).unwrap())
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_delta-ineq"))
}

#[test]
fn eval_worked_example() {
    let (code, text) = capture(&["eval", "--config", &worked()]);
    assert_eq!(code, 0);
    let r: EvalReport = serde_json::from_str(&text).unwrap();
    assert_eq!(r.identity.lhs, -3.5);
    assert_eq!(r.moments.int_abs_p, 1.0);
    assert_eq!(r.sup_abs_derivative, 7.0);
    let t5 = r.rows.iter().find(|row| row.key() == "T5/corrected").unwrap();
    assert_eq!(t5.slack, 3.5);
    let t8 = r.rows.iter().find(|row| row.key() == "T8/corrected").unwrap();
    assert_eq!((t8.lhs, t8.rhs), (1.5, 3.0));
    // f = g = t^2 breaks the literal product bound: 49 > 4
    let t6b = r.rows.iter().find(|row| row.key() == "T6b/literal").unwrap();
    assert_eq!((t6b.lhs, t6b.rhs, t6b.pass), (49.0, 4.0, false));
    assert_eq!(r.outcome, Outcome::Findings);
}

#[test]
fn one_trial_csv_has_six_rows_per_variant() {
    for (variant, rows) in [("literal", 6), ("corrected", 6), ("both", 12)] {
        let (_, text) = capture(&["eval", "--config", &worked(), "--format", "csv", "--variant", variant]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_VERSION_LINE);
        assert_eq!(lines[1], CSV_HEADER.join(","));
        assert_eq!(lines.len() - 2, rows, "{variant}");
        let theorems: Vec<&str> = lines[2..8].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
        assert_eq!(theorems, ["T5", "T6a", "T6b", "T7-L2", "T7-Gruss", "T8"]);
    }
}

#[test]
fn csv_floats_round_trip() {
    let (_, text) = capture(&["verify-bounds", "--trials", "3", "--seed", "5", "--format", "csv"]);
    let (_, json) = capture(&["verify-bounds", "--trials", "3", "--seed", "5"]);
    let report = SuiteReport::from_json(&json).unwrap();
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let mut n = 0;
    for (rec, row) in reader.records().zip(&report.rows) {
        let rec = rec.unwrap();
        assert_eq!(rec[9].parse::<f64>().unwrap(), row.lhs);
        assert_eq!(rec[10].parse::<f64>().unwrap(), row.rhs);
        assert_eq!(rec[11].parse::<f64>().unwrap(), row.slack);
        n += 1;
    }
    assert_eq!(n, report.rows.len());
}

#[test]
fn json_report_round_trips() {
    let (code, text) = capture(&["verify-identity", "--trials", "50", "--seed", "7"]);
    assert_eq!(code, 0);
    let report = SuiteReport::from_json(&text).unwrap();
    assert_eq!(report.outcome, Outcome::Pass);
    assert_eq!(SuiteReport::from_json(&report.to_json().unwrap()).unwrap(), report);
    assert!(report.max_residual("identity") <= 1e-10 * 1e3);
}

#[test]
fn output_is_pure_in_arguments() {
    let strip = |s: String| {
        let mut r = SuiteReport::from_json(&s).unwrap();
        r.wall_time_ms = 0;
        r
    };
    let args = ["crosscheck", "--trials", "40", "--seed", "9"];
    assert_eq!(strip(capture(&args).1), strip(capture(&args).1));
}

#[test]
fn literal_bounds_exit_zero_with_findings() {
    let out = bin().args(["verify-bounds", "--variant", "literal", "--seed", "7"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = SuiteReport::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report.outcome, Outcome::Findings);
    assert!(report.findings.iter().any(|w| w.theorem == "T5"));
    assert!(report.findings.iter().any(|w| w.theorem == "T6b"));
    assert!(report.failures.is_empty());
}

#[test]
fn literal_t5_witness_is_a_finding() {
    let path = configs().join("literal_t5_witness.json");
    let (code, text) = capture(&["eval", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r: EvalReport = serde_json::from_str(&text).unwrap();
    let t5 = r.rows.iter().find(|row| row.key() == "T5/literal").unwrap();
    assert_eq!((t5.lhs, t5.rhs, t5.slack), (7.0, 3.5, -3.5));
    assert_eq!(r.outcome, Outcome::Findings);
}

#[test]
fn failure_exits_two() {
    // a tolerance below the rounding floor turns identity rounding residuals into failures
    let out = bin().args(["verify-identity", "--trials", "50", "--seed", "1", "--tol", "1e-300"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let report = SuiteReport::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report.outcome, Outcome::Failure);
    assert!(!report.failures.is_empty());
}

#[test]
fn range_excluding_derivative_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("narrow.json");
    std::fs::write(
        &cfg,
        r#"{"spec":{"scale":{"kind":"integer","lo":0,"hi":4},"a":0,"b":4,"x":2,"alpha":1,"beta":1,
            "h":{"repr":"poly","coeffs":[0,1]}},"f":{"repr":"poly","coeffs":[0,0,1]},"range":[2,3]}"#,
    )
    .unwrap();
    let out = bin().args(["eval", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_file_and_unwritable_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let out = bin()
        .args(["eval", "--config", &worked(), "--format", "csv", "--out", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with(CSV_VERSION_LINE));

    let bad = dir.path().join("missing").join("r.json");
    let out = bin().args(["verify-identity", "--trials", "5", "--out", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let mut sink = Vec::new();
    let err = run(["delta-ineq", "verify-identity", "--trials", "5", "--out", bad.to_str().unwrap()], &mut sink);
    assert!(matches!(err, Err(CliError::Io { .. })));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["verify-bounds", "--variant", "sometimes"],
        vec!["verify-bounds", "--trials", "0"],
        vec!["verify-bounds", "--tol", "-1"],
        vec!["eval"],
        vec!["sharpness", "--theorem", "T9"],
        vec!["verify-identity", "--scale", r#"{"kind":"integer","lo":3,"hi":1}"#],
        vec!["frobnicate"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn inline_scale_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.json");
    std::fs::write(&cfg, r#"{"seed":3,"n_trials":20,"variants":["corrected"]}"#).unwrap();
    let (code, text) = capture(&[
        "verify-bounds",
        "--config",
        cfg.to_str().unwrap(),
        "--variant",
        "corrected",
        "--scale",
        r#"{"kind":"qlattice","q":2.0,"kmin":0,"kmax":6}"#,
    ]);
    assert_eq!(code, 0);
    let r = SuiteReport::from_json(&text).unwrap();
    assert_eq!((r.seed, r.n_trials, r.outcome), (3, 20, Outcome::Pass));
    assert!(r.rows.iter().all(|row| row.spec.scale_kind == "qlattice"));
}

#[test]
fn sharpness_reaches_one_on_t5() {
    let (code, text) = capture(&["sharpness", "--scale", r#"{"kind":"integer","lo":0,"hi":8}"#]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["best_ratio"].as_f64().unwrap() >= 0.99);
    assert_eq!(v["violation"], false);
}

//! End-to-end checks of the binary: exit codes, wire formats, determinism,
//! and the experiment log.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_goldsieve"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

#[test]
fn primes_lists_exact_values() {
    let out = stdout(&["primes", "--limit", "11"]);
    assert!(out.contains("2 3 5 7 11"));

    let json: serde_json::Value =
        serde_json::from_str(&stdout(&["primes", "--limit", "11", "--format", "json"])).unwrap();
    assert_eq!(json["primes"], serde_json::json!([2, 3, 5, 7, 11]));
}

#[test]
fn scheme_round_trips_through_count() {
    let scheme = stdout(&["scheme", "--x", "72", "--format", "json"]);
    assert_eq!(
        scheme.trim(),
        r#"{"kind":"even","x":72,"primes":[2,3,5,7],"selected":[[0],[0],[0,2],[0,2]]}"#
    );
    let count = stdout(&[
        "count",
        "--scheme",
        scheme.trim(),
        "--from",
        "1",
        "--to",
        "72",
        "--naive",
        "--format",
        "json",
    ]);
    let json: serde_json::Value = serde_json::from_str(&count).unwrap();
    assert_eq!(json["count"], json["naive_count"]);
}

#[test]
fn goldbach_report_matches_worked_example() {
    let out = stdout(&["goldbach", "--x", "72", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(
        json["report"]["permitted_indices"],
        serde_json::json!([11, 13, 19, 29, 31, 41, 43, 53, 59, 61, 71])
    );
    assert_eq!(json["report"]["oracle_count"], 6);
    assert_eq!(json["report"]["derived_lower_bound"], 5);
}

#[test]
fn density_serializes_exact_rationals_as_strings() {
    let out = stdout(&["density", "--k", "4", "--format", "json"]);
    assert!(out.contains(r#""delta":{"num":"1","den":"2","float":0.5}"#));
}

#[test]
fn reports_are_byte_identical_across_runs_and_threads() {
    let args = [
        "extrema", "--k", "35", "--role", "left", "--samples", "200", "--seed", "42",
        "--format", "json",
    ];
    let first = stdout(&args);
    let second = stdout(&args);
    assert_eq!(first, second);

    let mut threaded: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    threaded.extend(["--threads".to_string(), "2".to_string()]);
    let threaded_refs: Vec<&str> = threaded.iter().map(|s| s.as_str()).collect();
    assert_eq!(first, stdout(&threaded_refs));
}

#[test]
fn extrema_json_round_trips_byte_identically() {
    let out = stdout(&[
        "extrema", "--k", "6", "--role", "right", "--samples", "50", "--seed", "3",
        "--format", "json",
    ]);
    let parsed: goldsieve_core::analytics::ExtremaReport =
        serde_json::from_str(out.trim()).expect("parses back into the report type");
    let re = serde_json::to_string(&parsed).unwrap();
    assert_eq!(re, out.trim());
}

#[test]
fn scan_streams_reports_then_summary() {
    let out = stdout(&[
        "scan", "--from", "6", "--to", "12", "--reports", "--format", "json",
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5); // 4 reports + summary
    let first: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(first["x"], 6);
    assert_eq!(first["permitted_indices"], serde_json::json!([3, 5]));
    let summary: serde_json::Value = serde_json::from_str(lines[4]).unwrap();
    assert_eq!(summary["reports"], 4);
    assert_eq!(summary["violations"], serde_json::json!([]));
}

#[test]
fn scan_csv_has_documented_columns() {
    let out = stdout(&[
        "scan", "--from", "6", "--to", "8", "--reports", "--format", "csv",
    ]);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "x,k,includes_one,c_k_x,oracle_count,derived_lower_bound"
    );
    assert_eq!(lines.next().unwrap(), "6,1,true,3,1,0");
}

#[test]
fn verify_suites_pass_and_list_is_complete() {
    let listed = stdout(&["verify", "--list"]);
    for suite in [
        "prop-2.9",
        "prop-2.12",
        "prop-2.14",
        "prop-2.16",
        "lemma-3.7",
        "thm-4.13",
        "lemma-5.2",
        "lemma-6.2",
        "lemma-7.1",
        "lemma-7.6-survey",
        "thm-8.8-scan",
    ] {
        assert!(listed.contains(suite), "{suite} missing from --list");
    }

    let out = run(&[
        "verify", "--suite", "prop-2.14", "--k", "6", "--samples", "50", "--seed", "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("pass"));
}

#[test]
fn usage_and_domain_errors_exit_2() {
    assert_eq!(run(&["primes", "--limit", "1"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(
        run(&["count", "--scheme", "{broken", "--from", "1", "--to", "2"])
            .status
            .code(),
        Some(2)
    );
    // malformed scheme content (wrong basis for x)
    let bad = r#"{"kind":"even","x":72,"primes":[2,3,5],"selected":[[0],[0],[0,2]]}"#;
    assert_eq!(
        run(&["count", "--scheme", bad, "--from", "1", "--to", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn log_appends_one_record_per_invocation() {
    let dir = tempfile::tempdir().unwrap();
    let log: PathBuf = dir.path().join("runs.jsonl");
    let log_str = log.to_str().unwrap();

    stdout(&["density", "--k", "4", "--log", log_str]);
    stdout(&["goldbach", "--x", "72", "--log", log_str]);

    let contents = std::fs::read_to_string(&log).unwrap();
    let lines: Vec<&str> = contents.lines().collect();
    assert_eq!(lines.len(), 2);
    for line in &lines {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(record["timestamp"].is_string());
        assert!(record["elapsed_ms"].is_number());
        assert_eq!(record["version"], env!("CARGO_PKG_VERSION"));
    }
    let second: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
    assert_eq!(second["suite"], "goldbach");
    assert_eq!(second["outcome"]["status"], "pass");
}

#[test]
fn out_flag_writes_report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    stdout(&[
        "goldbach", "--x", "100", "--format", "json", "--out", path.to_str().unwrap(),
    ]);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["report"]["oracle_count"], 6);
}

#[test]
fn env_caps_are_honored() {
    let out = bin()
        .args(["survey", "--k", "4", "--from", "1", "--to", "100", "--exhaustive"])
        .env("GOLDSIEVE_EXHAUSTIVE_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1260"));
}

#[test]
fn bench_runs_and_reports_throughput() {
    let out = stdout(&["bench", "--k", "10", "--sizes", "100000", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["rows"][0]["size"], 100_000);
    assert!(json["rows"][0]["indices_per_sec"].as_f64().unwrap() > 0.0);
}

//! End-to-end checks of the command-line surface: JSON on stdout,
//! human notes on stderr, exit code zero exactly when the report is
//! clean.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_treeba"))
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_model(dir: &std::path::Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).expect("fixture written");
    path.to_string_lossy().into_owned()
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("treeba-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}

#[test]
fn build_reports_stats() {
    let dir = tempdir();
    let model = write_model(&dir, "chain.model", "h=1,1; J=1; D=2\n0\n0/0/*\n");
    let out = run(&["build", &model, "--builder", "tr"]);
    assert!(out.status.success());
    let report = json_of(&out);
    assert_eq!(report["points"], 5);
    assert_eq!(report["atoms"], 5);
    assert_eq!(report["cardinality"], "32");
    assert_eq!(report["length"], 6);
}

#[test]
fn check_zero_with_closed_form() {
    let dir = tempdir();
    let model = write_model(&dir, "chain2.model", "h=1,1; J=1; D=2\n0\n0/0/*\n");
    let out = run(&[
        "check",
        &model,
        "--builder",
        "tr",
        "--query",
        "zero",
        "--term",
        "(and x:0/0/* (not x:0))",
        "--oracle-and-closed-form",
    ]);
    assert!(out.status.success());
    let report = json_of(&out);
    assert_eq!(report["zero"], true);
    assert_eq!(report["closed_form"], true);
    assert_eq!(report["agreement"], true);
    // A satisfiable meet produces a witness that re-evaluates to one.
    let out = run(&[
        "check", &model, "--builder", "tr", "--query", "zero", "--term", "(and x:. x:0)",
    ]);
    assert!(out.status.success());
    let report = json_of(&out);
    assert_eq!(report["zero"], false);
    let witness = report["witness"].as_array().expect("witness emitted");
    assert!(witness.iter().any(|w| w["generator"] == "x:." && w["value"] == true));
}

#[test]
fn malformed_node_line_reports_line_number() {
    let dir = tempdir();
    let model = write_model(&dir, "bad.model", "h=1; J=2; D=1\n0\nnot-a-node\n");
    let out = run(&["build", &model]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 3"), "stderr was: {}", stderr);
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let out = run(&["suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn surgery_and_quotient_round() {
    let out = run(&["surgery", "--b1-atoms", "2", "--a-star", "atom:0", "--b-atoms", "3"]);
    assert!(out.status.success());
    let report = json_of(&out);
    assert_eq!(report["result_points"], 4);
    assert_eq!(report["embedding_injective"], true);

    let dir = tempdir();
    let model = write_model(&dir, "fan.model", "h=1; J=2; D=1\n0\n1\n");
    let out = run(&["quotient", &model, "--ideal", "elem:{1}"]);
    assert!(out.status.success());
    let report = json_of(&out);
    assert_eq!(report["isomorphism_found"], true);
    assert_eq!(report["improper"], false);
}

#[test]
fn trees_verifies_and_dumps() {
    let out = run(&["trees", "--depth", "2"]);
    assert!(out.status.success());
    let report = json_of(&out);
    assert_eq!(report["family"]["k"], serde_json::json!([0, 5, 15]));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("pass"));
}

#[test]
fn suite_exit_code_tracks_the_report() {
    let out = run(&["suite", "surgery", "--seed", "12"]);
    assert!(out.status.success());
    let report = json_of(&out);
    assert_eq!(report["suite"], "surgery");
    assert_eq!(report["seed"], 12);
    assert!(report["criteria"][0]["pass"].as_bool().unwrap());
}

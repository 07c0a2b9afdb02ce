//! End-to-end checks of the command line: exit codes, report shape,
//! determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polystruct"))
}

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn analyze_minimal_fixture() {
    let path = fixture_path("heisenberg_a.json");
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("minimal=true"), "{text}");
    assert!(text.contains("D5+(0) (+) D1-(0)"), "{text}");
}

#[test]
fn analyze_non_minimal_fixture_reports_witness() {
    let path = fixture_path("heisenberg_b.json");
    let out = run(&["analyze", path.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["verdicts"]["minimal"], serde_json::Value::Bool(false));
    assert!(
        !value["courant_tensor"].as_array().unwrap().is_empty(),
        "nonzero tensor entries serve as the witness"
    );
    // deterministic byte-for-byte output
    let again = run(&["analyze", path.to_str().unwrap(), "--json"]);
    assert_eq!(text, String::from_utf8(again.stdout).unwrap());
}

#[test]
fn torsion_max_flag_caps_orders() {
    let path = fixture_path("heisenberg_c.json");
    let out = run(&["analyze", path.to_str().unwrap(), "--json", "--torsion-max", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(value["torsion"].as_array().unwrap().len(), 3);
}

#[test]
fn malformed_document_exits_two() {
    let dir = std::env::temp_dir();
    let path = dir.join("polystruct_malformed.json");
    std::fs::write(&path, r#"{"name": "x", "dim": 1, "bracket": []}"#).unwrap();
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // unknown fields are rejected too
    let path = dir.join("polystruct_unknown_field.json");
    std::fs::write(
        &path,
        r#"{"name":"x","dim":1,"bracket":[],"phi":[["0","0"],["0","0"]],"extra":true}"#,
    )
    .unwrap();
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // a non-skew endomorphism is a validation error as well
    let path = dir.join("polystruct_not_skew.json");
    std::fs::write(
        &path,
        r#"{"name":"x","dim":1,"bracket":[],"phi":[["1","0"],["0","1"]]}"#,
    )
    .unwrap();
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("skew"), "{err}");

    // and so is a failing Jacobi identity
    let path = dir.join("polystruct_bad_jacobi.json");
    std::fs::write(
        &path,
        r#"{"name":"x","dim":3,
            "bracket":[[1,2,3,"1"],[1,3,1,"1"]],
            "phi":[["0","0","0","0","0","0"],["0","0","0","0","0","0"],
                   ["0","0","0","0","0","0"],["0","0","0","0","0","0"],
                   ["0","0","0","0","0","0"],["0","0","0","0","0","0"]]}"#,
    )
    .unwrap();
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("Jacobi"), "{err}");
}

#[test]
fn unsupported_spectrum_exits_three() {
    // the lift of a metallic structure has eigenvalues outside the Gaussian
    // rationals
    let dir = std::env::temp_dir();
    let path = dir.join("polystruct_metallic.json");
    std::fs::write(
        &path,
        r#"{
            "name": "metallic",
            "dim": 2,
            "bracket": [],
            "phi": [
                ["0","1","0","0"],
                ["1","1","0","0"],
                ["0","0","0","-1"],
                ["0","0","-1","-1"]
            ]
        }"#,
    )
    .unwrap();
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unsupported spectrum"), "{err}");
}

#[test]
fn fixtures_filter_runs_selected_fixtures_only() {
    let out = run(&["fixtures", "--filter", "resonance"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("resonance_1_3"));
    assert!(!text.contains("heisenberg_a"));
    assert!(text.lines().all(|l| !l.contains("FAIL") || l.contains("assertions")));
}

#[test]
fn blocks_and_dlambda_subcommands() {
    let path = fixture_path("heisenberg_c.json");
    let out = run(&["blocks", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("D2+(i,-i)"), "{text}");
    assert!(text.contains("chain at"), "{text}");

    let out = run(&["dlambda", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("vector criterion holds"), "{text}");
}

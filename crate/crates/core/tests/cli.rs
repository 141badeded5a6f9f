//! End-to-end runs of the `lc-jacobi` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn models_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn model(name: &str) -> String {
    models_dir().join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lc-jacobi"))
        .args(args)
        .env("LCJ_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn records(text: &str) -> Vec<Value> {
    text.lines().map(|l| serde_json::from_str(l).expect("one JSON object per line")).collect()
}

#[test]
fn classify_reports_limit_circle() {
    let out = run(&["--model", &model("model_a.toml"), "--command", "classify"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["schema"], 1);
    assert_eq!(recs[0]["command"], "classify");
    assert_eq!(recs[0]["classification"], "LC_candidate");
}

#[test]
fn eigenvalues_of_infinite_extension_include_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eigs.csv");
    let out = run(&[
        "--model",
        &model("model_a.toml"),
        "--command",
        "eigs",
        "--t",
        "inf",
        "--window",
        "-1,1",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let headers = reader.headers().unwrap().clone();
    assert_eq!(headers.get(0), Some("schema"));
    let col = headers.iter().position(|h| h == "lambda").expect("lambda column");
    let lambdas: Vec<f64> = reader.records().map(|r| r.unwrap()[col].parse().unwrap()).collect();
    assert!(lambdas.iter().any(|l| l.abs() < 1e-10), "{lambdas:?}");
}

#[test]
fn verify_passes_and_writes_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.jsonl");
    let out = run(&["--model", &model("model_a.toml"), "--command", "verify", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let checks = records(&std::fs::read_to_string(&path).unwrap());
    assert!(!checks.is_empty());
    for c in &checks {
        assert_eq!(c["pass"], true, "{c}");
    }
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify.jsonl.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["status"], "ok");
    assert_eq!(meta["config"]["command"], "verify");
}

#[test]
fn outputs_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let mut contents = Vec::new();
    for name in ["a.jsonl", "b.jsonl"] {
        let path = dir.path().join(name);
        let out = run(&[
            "--model",
            &model("model_c.toml"),
            "--command",
            "gamma",
            "--z",
            "0,1;1,1;-2,0.5",
            "--t",
            "0.5",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        contents.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(contents[0], contents[1]);
    let text = String::from_utf8(contents[0].clone()).unwrap();
    assert_eq!(records(&text).len(), 3);
}

#[test]
fn model_errors_name_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "kind = \"power\"\np = \"two\"\nshift = 1\n").unwrap();
    let out = run(&["--model", path.to_str().unwrap(), "--command", "classify"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("`p`"), "{err}");
}

#[test]
fn t_and_omega_are_exclusive() {
    let out = run(&["--model", &model("model_a.toml"), "--command", "gamma", "--z", "0,1", "--t", "0", "--omega", "1,0"]);
    assert_eq!(out.status.code(), Some(2));
}

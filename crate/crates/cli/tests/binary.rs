use std::path::Path;
use std::process::Command;

use agler_cli::format::{read_certificate, read_report, write_certificate};

fn agler() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_agler"));
    for (k, _) in std::env::vars() {
        if k.starts_with("AGLER_") {
            c.env_remove(k);
        }
    }
    c
}

fn write_one(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("one.poly.json");
    std::fs::write(
        &path,
        r#"{"nvars": 3, "degree": [1, 1, 1], "coeffs": [{"idx": [0, 0, 0], "re": 1.0, "im": 0.0}]}"#,
    )
    .unwrap();
    path
}

#[test]
fn certify_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_one(dir.path());
    let st = agler().arg("certify").arg(&input).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let cert = dir.path().join("one.cert.json");
    let report = dir.path().join("one.report.json");
    assert!(read_report(&std::fs::read_to_string(&report).unwrap()).unwrap().pass);

    let vreport = dir.path().join("v.json");
    let st = agler().arg("verify").arg(&cert).arg("--report").arg(&vreport).status().unwrap();
    assert_eq!(st.code(), Some(0));
}

#[test]
fn tampered_and_truncated_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_one(dir.path());
    let cert_path = dir.path().join("c.json");
    let st = agler()
        .args(["certify", input.to_str().unwrap(), "--out", cert_path.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    let text = std::fs::read_to_string(&cert_path).unwrap();

    let mut cert = read_certificate(&text).unwrap();
    cert.h1.entries_mut()[0] = cert.h1.entries()[0].scale(agler_core::C64::new(1.001, 0.0));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, write_certificate(&cert)).unwrap();
    let out = agler().arg("verify").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let line = String::from_utf8(out.stderr).unwrap();
    let diag: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(diag["kind"], "verification_failed");

    let cut = dir.path().join("cut.json");
    std::fs::write(&cut, &text[..text.len() / 2]).unwrap();
    assert_eq!(agler().arg("verify").arg(&cut).status().unwrap().code(), Some(2));
    assert_eq!(agler().arg("verify").arg(dir.path().join("missing.json")).status().unwrap().code(), Some(2));
}

#[test]
fn unstable_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("u.json");
    std::fs::write(
        &input,
        r#"{"nvars": 3, "degree": [1, 0, 1], "coeffs": [{"idx": [0, 0, 0], "re": 1.0, "im": 0.0}, {"idx": [1, 0, 0], "re": -1.0, "im": 0.0}]}"#,
    )
    .unwrap();
    let out = agler().arg("certify").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1);
    let diag: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(diag["kind"], "unstable");
}

#[test]
fn gen_is_seeded_and_env_mirrors_flags() {
    let run = |args: &[&str], env: Option<&str>| {
        let mut c = agler();
        c.args(args);
        if let Some(seed) = env {
            c.env("AGLER_SEED", seed);
        }
        let out = c.output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    let a = run(&["gen", "-n", "2", "-m", "1", "--seed", "5"], None);
    assert_eq!(a, run(&["gen", "-n", "2", "-m", "1", "--seed", "5"], None));
    assert_eq!(a, run(&["gen", "-n", "2", "-m", "1"], Some("5")));
    assert_eq!(a, run(&["gen", "-n", "2", "-m", "1", "--seed", "5"], Some("6")));
    assert_ne!(a, run(&["gen", "-n", "2", "-m", "1"], Some("6")));
}

#[test]
fn generated_instance_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.json");
    let st = agler()
        .args(["gen", "-n", "2", "-m", "1", "--seed", "3", "--out", input.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    assert_eq!(agler().arg("certify").arg(&input).status().unwrap().code(), Some(0));
}

#[test]
fn lab_report_is_ordered_json() {
    let out = agler().args(["lab", "-n", "1", "-m", "1", "--trials", "3", "--seed", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let idx: Vec<u64> = v["trials"].as_array().unwrap().iter().map(|t| t["index"].as_u64().unwrap()).collect();
    assert_eq!(idx, vec![0, 1, 2]);
    let again = agler().args(["lab", "-n", "1", "-m", "1", "--trials", "3", "--seed", "2"]).output().unwrap();
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn usage_errors_exit_two() {
    let out = agler().args(["certify"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = agler().args(["gen", "-n", "1", "-m", "1", "--lambda", "1.5"]).output().unwrap();
    assert_ne!(out.status.code(), Some(0));
}

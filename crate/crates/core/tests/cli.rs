use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn specjac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specjac")).args(args).output().expect("spawn specjac")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("specjac-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn help_and_bad_arguments() {
    assert_eq!(code(&specjac(&["--help"])), 0);
    assert_eq!(code(&specjac(&["frobnicate"])), 64);
    assert_eq!(code(&specjac(&["pipeline", "--N", "1"])), 64);
    assert_eq!(code(&specjac(&["euler", "--n", "1"])), 64);
}

#[test]
fn euler_reports_exact_values() {
    let out = specjac(&["euler", "--N", "2", "--n", "2", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["chi"], "-1");
    let out = specjac(&["euler", "--N", "3", "--n", "2"]);
    assert_eq!(json(&out)["chi"], "21");
}

#[test]
fn pipeline_is_deterministic_across_thread_counts() {
    let args = ["pipeline", "--N", "3", "--n", "2", "--seed", "4"];
    let a = specjac(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_specjac")).args(args).env("SPECJAC_THREADS", "1").output().unwrap();
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_specjac")).args(args).env("SPECJAC_THREADS", "x").output().unwrap();
    assert_eq!(code(&bad), 64);
}

#[test]
fn verify_exit_codes() {
    assert_eq!(code(&specjac(&["verify", "--N", "3", "--n", "2", "--seed", "5", "--zw-sign", "minus"])), 0);
    // the literal {z,w} sign and an impossible tolerance both fail the checks
    assert_eq!(code(&specjac(&["verify", "--N", "2", "--n", "2"])), 3);
    assert_eq!(code(&specjac(&["verify", "--N", "2", "--n", "2", "--zw-sign", "minus", "--rtol", "1e-30"])), 3);
}

#[test]
fn gen_separate_reconstruct_chain() {
    let (lax, div, rec) = (scratch("lax.json"), scratch("div.json"), scratch("rec.json"));
    let s = |p: &PathBuf| p.to_str().unwrap().to_owned();
    assert_eq!(code(&specjac(&["gen", "--N", "2", "--n", "3", "--seed", "9", "--shape", "l", "--out", &s(&lax)])), 0);
    assert_eq!(code(&specjac(&["separate", "--in", &s(&lax), "--out", &s(&div)])), 0);
    let out = specjac(&["reconstruct", "--in", &s(&div), "--out", &s(&rec)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&rec).unwrap()).unwrap();
    assert!(report.is_object());
    // a second run writes the same bytes
    let again = scratch("rec2.json");
    specjac(&["reconstruct", "--in", &s(&div), "--out", &s(&again)]);
    assert_eq!(std::fs::read(&rec).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn missing_input_file_is_reported() {
    let out = specjac(&["separate", "--in", "/nonexistent/specjac.json"]);
    assert_ne!(code(&out), 0);
    assert!(!out.stderr.is_empty());
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn stablesg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stablesg")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn generate(dir: &TempDir, name: &str, spec: &str) -> PathBuf {
    let spec_path = dir.path().join(format!("{name}.spec.json"));
    std::fs::write(&spec_path, spec).unwrap();
    let out = dir.path().join(format!("{name}.json"));
    let o = stablesg(&["generate", spec_path.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn num(v: &Value) -> String {
    v.as_f64().unwrap().to_string()
}

#[test]
fn planted_affine_end_to_end() {
    let dir = TempDir::new().unwrap();
    let spec = r#"{"kind":"planted_affine","d":20,"k_planted":3,"n":80,"b":4.0,"noise":0.0005,"seed":1}"#;
    let cfg = generate(&dir, "aff", spec);
    let again = generate(&dir, "aff2", spec);
    assert_eq!(std::fs::read(&cfg).unwrap(), std::fs::read(&again).unwrap());

    let meta = read(&cfg)["metadata"].clone();
    let report = dir.path().join("report.json");
    let o = stablesg(&[
        "analyze", "affine", cfg.to_str().unwrap(),
        "--B", "4", "--delta", &num(&meta["delta"]), "--eps", &num(&meta["eps"]),
        "-o", report.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = read(&report);
    assert_eq!(r["passed"], Value::Bool(true));
    assert_eq!(r["input_digest"].as_str().unwrap().len(), 64);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["holds"] == Value::Bool(true)));
}

#[test]
fn example_affine_is_gated_and_force_names_failures() {
    let dir = TempDir::new().unwrap();
    let cfg = generate(&dir, "ex1", r#"{"kind":"example_affine","b":10.0,"d":4}"#);
    let base = ["analyze", "affine", cfg.to_str().unwrap(), "--B", "10", "--delta", "0.3", "--eps", "0.1"];
    let o = stablesg(&base);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("eps < c / B"));

    let mut forced = base.to_vec();
    forced.push("--force");
    let o = stablesg(&forced);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("failing checks") && err.contains("eps < c / B"), "{err}");
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["passed"], Value::Bool(false));
}

#[test]
fn planted_projective_end_to_end() {
    let dir = TempDir::new().unwrap();
    let cfg = generate(&dir, "proj", r#"{"kind":"planted_projective","d":24,"n":40,"mu":0.5,"noise":0.0001,"seed":3}"#);
    let meta = read(&cfg)["metadata"].clone();
    let o = stablesg(&[
        "analyze", "projective", cfg.to_str().unwrap(),
        "--mu", "0.5", "--delta", &num(&meta["delta"]), "--eps", &num(&meta["eps"]),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn planted_lcc_end_to_end() {
    let dir = TempDir::new().unwrap();
    let cfg = generate(&dir, "lcc", r#"{"kind":"planted_lcc","d":6,"d_prime":2,"n":60,"q":2,"b":4.0,"noise":0.0001,"seed":2}"#);
    let meta = read(&cfg)["metadata"].clone();
    let args = [
        "analyze", "lcc", cfg.to_str().unwrap(),
        "--q", "2", "--B", "4", "--delta", &num(&meta["delta"]), "--eps", &num(&meta["eps"]),
    ];
    let o = stablesg(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["result"]["verdict"]["verdict"], "yes");

    // a delta the family cannot beat is a hypothesis failure
    let mut big = args.to_vec();
    big[8] = "0.9";
    assert_eq!(code(&stablesg(&big)), 2);
}

#[test]
fn dim_eps_and_verify_design() {
    let dir = TempDir::new().unwrap();
    let cfg = generate(&dir, "ex1", r#"{"kind":"example_affine","b":10.0,"d":6}"#);
    let o = stablesg(&["dim-eps", cfg.to_str().unwrap(), "--eps", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r["result"]["lower"].as_u64().unwrap() >= 4);

    let o = stablesg(&["verify-design", cfg.to_str().unwrap(), "--eps", "0.12", "--kind", "affine", "--delta", "0.2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r["result"]["p"].as_u64().unwrap() >= 1);
}

#[test]
fn io_and_validation_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&stablesg(&["dim-eps", missing.to_str().unwrap(), "--eps", "1"])), 1);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"format_version":1,"dim":2,"points":[[[1,0]]]}"#).unwrap();
    assert_eq!(code(&stablesg(&["dim-eps", bad.to_str().unwrap(), "--eps", "1"])), 1);
    let spec = dir.path().join("spec.json");
    std::fs::write(&spec, r#"{"kind":"sphere_packing","d":2,"mu":1.9,"seed":0}"#).unwrap();
    assert_eq!(code(&stablesg(&["generate", spec.to_str().unwrap()])), 1);
}

#[test]
fn quick_selftest_exits_zero() {
    let o = stablesg(&["selftest", "--quick"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("total"));
}

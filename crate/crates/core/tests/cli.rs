use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn oqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oqc"))
        .args(args)
        .env_remove("OQC_SEED")
        .output()
        .expect("spawn oqc")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_json(path: &Path, v: &Value) {
    std::fs::write(path, serde_json::to_string(v).unwrap()).unwrap();
}

fn qubit_dim(label: &str) -> Value {
    json!({"total": 2, "registers": [{"label": label, "size": 2}]})
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let args = ["--seed", "7", "split", "simulate", "--trials", "100000", "--delta", "0.25"];
    let a = oqc(&args);
    let b = oqc(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["seed"], 7);
    assert!(v.get("timestamp").is_none());

    let c = oqc(&["--seed", "8", "split", "simulate", "--trials", "100000", "--delta", "0.25"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn seed_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_oqc"))
        .args(["channel", "upper", "--capacity", "1", "--eta", "0.01"])
        .env("OQC_SEED", "41")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["seed"], 41);
}

#[test]
fn dimension_mismatch_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let rho = dir.path().join("rho.json");
    let sigma = dir.path().join("sigma.json");
    write_json(
        &rho,
        &json!({"dim": qubit_dim("A"), "matrix": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]}),
    );
    write_json(
        &sigma,
        &json!({
            "dim": {"total": 3, "registers": [{"label": "A", "size": 3}]},
            "vector": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]
        }),
    );
    let out = oqc(&["measures", "dmax", "--rho", rho.to_str().unwrap(), "--sigma", sigma.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("dimension mismatch"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_state_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let rho = dir.path().join("rho.json");
    // Trace 2.
    write_json(
        &rho,
        &json!({"dim": qubit_dim("A"), "matrix": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]}),
    );
    let out = oqc(&["measures", "entropy", "--rho", rho.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dmax_of_pure_state_against_mixed() {
    let dir = tempfile::tempdir().unwrap();
    let rho = dir.path().join("rho.json");
    let sigma = dir.path().join("sigma.json");
    write_json(&rho, &json!({"dim": qubit_dim("A"), "vector": [[1.0, 0.0], [0.0, 0.0]]}));
    write_json(
        &sigma,
        &json!({"dim": qubit_dim("A"), "matrix": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]}),
    );
    let out = oqc(&["measures", "dmax", "--rho", rho.to_str().unwrap(), "--sigma", sigma.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["results"]["dmax"].as_f64().unwrap() - 1.0).abs() < 1e-9, "{v}");
}

#[test]
fn ensemble_artifact_feeds_check_and_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let ens = dir.path().join("ens.json");
    let ens_s = ens.to_str().unwrap();
    let out = oqc(&[
        "--seed", "3", "--out", ens_s, "ensemble", "build", "--d", "8", "--m", "4096", "--eps", "1.0",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let check = oqc(&["ensemble", "check", "--ensemble", ens_s, "--eps", "1.0"]);
    assert_eq!(check.status.code(), Some(0));
    assert_eq!(stdout_json(&check)["results"]["passed"], true);

    let cap = oqc(&["channel", "capacity", "--ensemble", ens_s, "--delta", "0.25", "--eps", "1.0"]);
    assert_eq!(cap.status.code(), Some(0));
    let r = &stdout_json(&cap)["results"];
    let c = r["capacity"].as_f64().unwrap();
    assert!(c > 0.0 && c <= 3.0 + 1e-9);
    assert_eq!(r["within_bound"], true);
}

#[test]
fn gated_lower_bound_refuses_then_reports_when_ungated() {
    let base = ["channel", "sim-lower", "--log2-d", "40", "--delta", "0.03125", "--eta", "1e-4"];
    let gated = oqc(&base);
    assert_eq!(gated.status.code(), Some(2));

    let mut args = base.to_vec();
    args.push("--ungated");
    let ungated = oqc(&args);
    assert_eq!(ungated.status.code(), Some(0));
    let r = &stdout_json(&ungated)["results"];
    assert!((r["value"].as_f64().unwrap() - 0.99f64.powi(2) * 28.0).abs() < 1e-9);
    assert_eq!(r["admissible"], false);
}

#[test]
fn csv_output() {
    let out = oqc(&["--format", "csv", "channel", "upper", "--capacity", "0", "--eta", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.lines().any(|l| l.starts_with("results.") && l.ends_with(",2.0")), "{text}");
}

#[test]
fn usage_errors() {
    assert_eq!(oqc(&["split", "simulate", "--trials", "many"]).status.code(), Some(1));
    assert_eq!(oqc(&[]).status.code(), Some(1));
    assert_eq!(oqc(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_all_passes() {
    let out = oqc(&["--seed", "5", "verify-all", "--instances", "40"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(stdout_json(&out)["results"]["all_passed"], true);
}

use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qnet").chain(args.iter().copied());
    let code = qnetstates::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "stderr: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn bounds_for_qubits_at_index_one() {
    let v = json(&["bounds", "--d", "2", "--beta", "1"]);
    assert!((v["ub2"].as_f64().unwrap() - 0.9).abs() < 1e-12);
    assert!(v["ub1"].as_f64().unwrap() > 0.9);
}

#[test]
fn standardize_triangle_fixture() {
    let v = json(&["standardize", "--graph", &data("k3_d2.json")]);
    assert_eq!(v["beta"], 1);
    assert_eq!(v["lc_sequence"].as_array().unwrap().len(), 1);
    // The standard form of the triangle is the path 2 - 1 - 3.
    assert_eq!(v["graph"]["edges"], serde_json::json!([[1, 2, 1], [1, 3, 1]]));
}

#[test]
fn exhaustive_and_deterministic_agree_on_small_fixture() {
    let det = json(&["bounds", "--graph", &data("path3_d3.json")]);
    let ex = json(&["bounds", "--graph", &data("path3_d3.json"), "--exhaustive"]);
    assert_eq!(det["beta"], ex["beta"]);
    assert_eq!(ex["minimal"], true);
}

#[test]
fn classify_seven_vertex_fixture() {
    let v = json(&["classify", "--graph", &data("seven_d3.json"), "--pair", "1,2"]);
    assert_eq!(v["class"], "G1");
}

#[test]
fn sweep_is_csv() {
    let (code, out, _) = run(&["bounds", "--sweep", "--primes", "2", "--betas", "1", "--precision", "4"]);
    assert_eq!(code, 0);
    assert_eq!(out, "d,beta,ub1,ub2\n2,1,0.9571,0.9\n3,1,0.9516,0.8561\n");
}

#[test]
fn protocol_runs_are_reproducible() {
    let args = ["protocol", "--which", "p1", "--t", "4", "--restarts", "8", "--seed", "11"];
    let a = json(&args);
    assert_eq!(a, json(&args));
    assert_eq!(a["seed"], 11);
    assert!(a["fidelity"].as_f64().unwrap() > 0.5);
}

#[test]
fn protocol_state_round_trip_feeds_bell() {
    let path = std::env::temp_dir().join(format!("qnet-cli-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    json(&["protocol", "--which", "p1", "--t", "2", "--state-out", p]);
    let v = json(&["bell", "--ineq", "#4", "--state", p, "--restarts", "10", "--format", "json"]);
    let _ = std::fs::remove_file(&path);
    assert_eq!(v["classical_bound"], 2.0);
    assert!(v["value"].as_f64().unwrap() > 1.9);
}

#[test]
fn figur_test_reports_no_failures() {
    let v = json(&["figur-test", "--samples", "50", "--seed", "3"]);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["passed"], 250);
}

#[test]
fn domain_errors_exit_one_with_json() {
    let (code, out, err) = run(&["bounds", "--d", "4", "--beta", "1"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"], "composite_modulus");

    let (code, _, err) = run(&["bell", "--ineq", "nope", "--ghz"]);
    assert_eq!(code, 1);
    assert!(err.contains("unknown_inequality"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["bounds", "--frobnicate"]).0, 2);
    assert_eq!(run(&["protocol"]).0, 2);
    assert_eq!(run(&[]).0, 2);
}

#[test]
fn binary_help_and_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_qnet");
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert!(help.status.success());
    let text = String::from_utf8_lossy(&help.stdout);
    for sub in ["standardize", "classify", "bounds", "protocol", "bell", "figur-test"] {
        assert!(text.contains(sub), "{sub} missing from help");
    }
    let bad = Command::new(bin).args(["bounds", "--d", "9", "--beta", "1"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

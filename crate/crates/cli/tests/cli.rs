use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_selberg-gas"));
    c.args(args).env_remove("SELBERG_GAS_THREADS");
    if let Some(t) = threads {
        c.env("SELBERG_GAS_THREADS", t);
    }
    c.output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args, None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn selberg_two_points_flat() {
    let v = json(&["selberg", "--n", "2", "--lambda1", "0", "--lambda2", "0"]);
    let got = v["results"][0]["value"].as_f64().unwrap();
    assert!((got - 1.0 / 6.0).abs() < 1e-14);
    assert_eq!(v["config"]["command"], "selberg");
    assert_eq!(v["provenance"]["seed"], 20_240_601);
}

#[test]
fn morris_flat_is_factorial() {
    let v = json(&["morris", "--n", "3", "--a", "0", "--b", "0"]);
    assert!((v["results"][0]["value"].as_f64().unwrap() - 6.0).abs() < 1e-12);
}

#[test]
fn mc_output_independent_of_threads() {
    let args = ["dm-mc", "--n", "6", "--x", "0.2", "--y", "0.7", "--m-samples", "400", "--seed", "9", "--format", "csv"];
    let one = run(&args, Some("1"));
    assert!(one.status.success());
    for t in ["2", "5"] {
        assert_eq!(one.stdout, run(&args, Some(t)).stdout);
    }
    let flag = run(&[&args[..], &["--threads", "3"]].concat(), None);
    assert_eq!(one.stdout, flag.stdout);
}

#[test]
fn sampler_output_independent_of_threads() {
    let args = ["sample-jue", "--n", "4", "--m-samples", "20", "--lambda1", "1.5", "--lambda2", "-0.5"];
    let one = run(&args, Some("1"));
    assert!(one.status.success());
    assert_eq!(one.stdout, run(&args, Some("4")).stdout);
}

#[test]
fn json_round_trip_is_stable() {
    let out = run(&["orbitals", "--j-max", "4"], None);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
    assert_eq!(again.as_bytes(), &out.stdout[..]);
    assert_eq!(v["results"].as_array().unwrap().len(), 5);
    assert_eq!(v["results"][0]["ratio_to_ground"], 1.0);
}

#[test]
fn table1_has_ten_rows() {
    let out = run(&["table1", "--n", "4", "--m-samples", "150", "--format", "csv"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# config: "));
    assert!(lines[1].starts_with("# provenance: seed="));
    assert_eq!(lines[2], "x,mc,std_error,asymptote,ratio");
    assert_eq!(lines.len(), 13);
}

#[test]
fn duality_sides_agree() {
    let v = json(&["duality-check", "--t", "0.3"]);
    let r = &v["results"][0];
    assert!((r["lhs"].as_f64().unwrap() - 0.0069125).abs() < 1e-12);
    assert!(r["relative_difference"].as_f64().unwrap() < 1e-10);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dm.json");
    let out = run(&["dm-asym", "--n", "14", "--x", "0.3", "--y", "0.6", "--out", path.to_str().unwrap()], None);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["results"][0]["value"].as_f64().unwrap() > 0.0);
    assert!(v["config"].get("out").is_none());
}

#[test]
fn bad_flag_is_usage_error() {
    assert_eq!(run(&["selberg", "--n", "two"], None).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"], None).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_one() {
    let out = run(&["selberg", "--n", "0", "--lambda1", "0", "--lambda2", "0"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn validate_single_criterion() {
    let v = json(&["validate", "--criteria", "2"]);
    assert_eq!(v["results"][0]["passed"], true);
    let bad = run(&["validate", "--criteria", "4"], None);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn toeplitz_drift_rows() {
    let v = json(&["fh-toeplitz", "--sizes", "4,8,16"]);
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let d: Vec<f64> = rows.iter().map(|r| r["delta"].as_f64().unwrap().abs()).collect();
    assert!(d[2] < d[1] && d[1] < d[0]);
}

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn cfx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfx")).args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("cfx-cli-{}-{name}", std::process::id()));
    std::fs::write(&p, body).unwrap();
    p
}

fn s_json(n: usize, diag: &str) -> String {
    let m = 4 * n;
    let rows: Vec<Vec<String>> =
        (0..m).map(|i| (0..m).map(|j| if i == j { diag.to_string() } else { "0".to_string() }).collect()).collect();
    serde_json::json!({ "n": n, "S": rows }).to_string()
}

#[test]
fn verify_flat_passes() {
    let o = cfx(&["verify", "flat", "--n", "1", "--k", "1", "--trials", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["pass"], true);
    assert_eq!(v["seed"], 0);
}

#[test]
fn verify_boundary_right_passes() {
    let o = cfx(&["verify", "boundary", "--group", "rightQH", "--k", "2", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let ids: Vec<String> = json(&o)["details"].as_array().unwrap().iter().map(|r| r["identity"].as_str().unwrap().to_string()).collect();
    assert!(ids.contains(&"boundary-complex-law".to_string()) && ids.contains(&"hodge-diag".to_string()));
}

#[test]
fn verify_boundary_left_anticommute_reports_curvature_residual() {
    let o = cfx(&["verify", "boundary", "--group", "leftQH", "--check", "anticommute", "--trials", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    let parts = v["details"].as_array().unwrap();
    assert_eq!(parts[0]["identity"], "dd-plus-E-wedge-T");
    assert_eq!(parts[0]["pass"], false);
    assert_ne!(parts[0]["residual"], "0");
    assert_eq!(parts[1]["identity"], "dd-minus-E-wedge-T");
    assert_eq!(parts[1]["pass"], true);
}

#[test]
fn classify_files() {
    let right = temp_file("right.json", &serde_json::to_string(&cfx::group::GroupSpec::right_qh(1).to_json()).unwrap());
    let o = cfx(&["classify", right.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["right_type"], true);
    assert_eq!(v["stratified"], true);
    assert_eq!(v["condition_H"], "sampled-true");

    let id = temp_file("id.json", &s_json(1, "1"));
    assert_eq!(json(&cfx(&["classify", id.to_str().unwrap()]))["right_type"], false);

    let zero = temp_file("zero.json", &s_json(1, "0"));
    let v = json(&cfx(&["classify", zero.to_str().unwrap()]));
    assert_eq!(v["right_type"], true);
    assert_eq!(v["stratified"], false);

    let bad = temp_file("bad.json", "{ not json");
    let o = cfx(&["classify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    for p in [right, id, zero, bad] {
        let _ = std::fs::remove_file(p);
    }
}

#[test]
fn symbol_table() {
    let o = cfx(&["symbol", "--n", "1", "--k", "1", "--v", "1,0,0,0,0,0,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["details"]["dims"], serde_json::json!([2, 4, 4, 2]));
    assert_eq!(v["details"]["ranks"], serde_json::json!([2, 2, 2]));
    assert_eq!(cfx(&["symbol", "--n", "1", "--k", "1", "--v", "0,0,0,0,0,0,0,0"]).status.code(), Some(2));
    assert_eq!(cfx(&["symbol", "--n", "1", "--k", "1", "--v", "-1,2/3,0,0,0,0,0,1"]).status.code(), Some(0));
    let csv = cfx(&["symbol", "--n", "1", "--k", "0", "--trials", "2", "--format", "csv"]);
    assert!(String::from_utf8_lossy(&csv.stdout).starts_with("identity,target,pass,residual,seed\n"));
}

#[test]
fn ma_runs_and_rejects_left_type() {
    let o = cfx(&["ma", "--n", "2", "--power", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert!(v["mass_direct"].as_f64().unwrap() > 0.0);
    assert!(v["empirical_C"].as_f64().unwrap() > 0.0);
    assert_eq!(cfx(&["ma", "--group", "leftQH", "--n", "1"]).status.code(), Some(3));
    assert_eq!(cfx(&["ma", "--n", "1", "--power", "2"]).status.code(), Some(2));
}

#[test]
fn ma_reads_polynomial_json() {
    let u = temp_file("u.json", r#"{"vars":["x_1","x_2"],"terms":[{"c":["1","0"],"e":[2,0]},{"c":["1","0"],"e":[0,2]}]}"#);
    let o = cfx(&["ma", "--n", "1", "--u", u.to_str().unwrap(), "--region", "0,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = cfx(&["ma", "--n", "1", "--u", u.to_str().unwrap(), "--region", "-1,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let bad = temp_file("ubad.json", r#"{"vars":["y_9"],"terms":[{"c":["1","0"],"e":[2]}]}"#);
    assert_eq!(cfx(&["ma", "--n", "1", "--u", bad.to_str().unwrap()]).status.code(), Some(2));
    let _ = std::fs::remove_file(u);
    let _ = std::fs::remove_file(bad);
}

#[test]
fn deterministic_output() {
    let args = ["verify", "boundary", "--group", "leftQH", "--k", "1", "--trials", "3", "--seed", "42"];
    let a = cfx(&args);
    let b = cfx(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 42);
}

#[test]
fn input_errors() {
    assert_eq!(cfx(&["verify", "flat", "--n", "4"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_cfx"))
        .args(["verify", "flat", "--degree", "3"])
        .env("CFX_MAX_DEGREE", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(cfx(&["verify", "boundary", "--check", "nope"]).status.code(), Some(2));
    assert_eq!(cfx(&["classify"]).status.code(), Some(2));
}

#[test]
fn writes_to_file() {
    let p = std::env::temp_dir().join(format!("cfx-cli-{}-out.json", std::process::id()));
    let o = cfx(&["verify", "flat", "--trials", "2", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(v["identity"], "verify-flat");
    let _ = std::fs::remove_file(p);
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn flipproc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flipproc"))
        .current_dir(golden(""))
        .env_remove("FLIPPROC_CAP")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn assert_golden(args: &[&str], code: i32, expected: &str) {
    let out = flipproc(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out), fs::read_to_string(golden(expected)).unwrap(), "{args:?}");
}

#[test]
fn compare_triangle_vs_identity_names_the_triangle_class() {
    assert_golden(&["compare", "triangle-removal.json", "identity3.json"], 1, "compare-triangle-identity.out");
    let v: Value = serde_json::from_str(&stdout(&flipproc(&["compare", "triangle-removal.json", "identity3.json"]))).unwrap();
    let diff = &v["first_difference"];
    assert_eq!(diff["class"], serde_json::json!({"code": 7, "a": 1, "b": 2}));
    assert_eq!(diff["left"], "-6");
    assert_eq!(diff["right"], "0");
}

#[test]
fn compare_ignorant_pair_is_equivalent() {
    assert_golden(&["compare", "ignorant-k4-halfhalf.json", "ignorant-k4-star.json"], 0, "compare-ignorant.out");
    let v: Value = serde_json::from_str(&fs::read_to_string(golden("compare-ignorant.out")).unwrap()).unwrap();
    assert_eq!(v["verdict"], "equivalent");
    assert_eq!(v["left"], v["right"]);
}

#[test]
fn unique_triangle_removal() {
    assert_golden(&["unique", "triangle-removal.json"], 0, "unique-triangle.out");
}

#[test]
fn unique_writes_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let out = flipproc(&["unique", "triangle-edge-removal.json", "--witness", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["unique"], false);
    assert_eq!(v["case"], "D1");
    let cmp = flipproc(&["compare", "triangle-edge-removal.json", path.to_str().unwrap()]);
    assert_eq!(cmp.status.code(), Some(0));
}

#[test]
fn classes_coeffs_velocity_integrate() {
    assert_golden(&["classes", "--k", "3"], 0, "classes-k3.out");
    assert_golden(&["coeffs", "triangle-removal.json"], 0, "coeffs-triangle.out");
    assert_golden(&["velocity", "triangle-removal.json", "0.5"], 0, "velocity-triangle.out");
    assert_golden(
        &["integrate", "triangle-removal.json", "0.8", "--t-max", "0.01", "--dt", "0.005"],
        0,
        "integrate-triangle.out",
    );
}

#[test]
fn dilation_and_k1() {
    let out = flipproc(&["compare", "--dilation", "triangle-removal.json", "triangle-edge-removal.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(serde_json::from_str::<Value>(&stdout(&out)).unwrap()["dilation"], "3");

    let out = flipproc(&["k1", "triangle-removal.json", "triangle-removal.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("CONJECTURE"));
    assert_eq!(serde_json::from_str::<Value>(&stdout(&out)).unwrap()["status"], "conjecture");
}

#[test]
fn lift_and_symmetrize_round_trip_through_compare() {
    let dir = tempfile::tempdir().unwrap();
    let lifted = dir.path().join("lifted.json");
    let sym = dir.path().join("sym.json");
    let l = lifted.to_str().unwrap();
    let s = sym.to_str().unwrap();
    assert_eq!(flipproc(&["lift", "triangle-removal.json", "--to", "4", "--out", l]).status.code(), Some(0));
    assert_eq!(flipproc(&["compare", l, "triangle-removal.json"]).status.code(), Some(0));
    assert_eq!(flipproc(&["symmetrize", l, "--out", s]).status.code(), Some(0));
    assert_eq!(flipproc(&["compare", s, "triangle-removal.json"]).status.code(), Some(0));
}

#[test]
fn named_matches_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let out = flipproc(&["named", "triangle-removal", "--k", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&path).unwrap(), fs::read_to_string(golden("triangle-removal.json")).unwrap());
}

#[test]
fn simulate_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let args = ["simulate", "triangle-removal.json", "--n", "60", "--w0", "0.8", "--time", "0.1", "--seed", "9", "--runs", "2", "--out"];
        let mut args = args.to_vec();
        args.push(path.to_str().unwrap());
        assert_eq!(flipproc(&args).status.code(), Some(0));
        fs::read_to_string(path).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    assert!(a.starts_with("run,t,block_i,block_j,density,reference,abs_dev\n"));
    assert_eq!(a.lines().count(), 1 + 2 * 11);
}

#[test]
fn transference_reports_json() {
    let out = flipproc(&[
        "transference", "triangle-removal.json", "--n", "200", "--w0", "0.8", "--time", "0.2", "--eps", "0.1", "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn exit_codes_for_errors() {
    let missing = flipproc(&["coeffs", "missing.json"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(missing.stdout.is_empty());

    let cap = flipproc(&["--cap", "3", "classes", "--k", "4"]);
    assert_eq!(cap.status.code(), Some(3));

    let env_cap = Command::new(env!("CARGO_BIN_EXE_flipproc"))
        .env("FLIPPROC_CAP", "3")
        .args(["classes", "--k", "4"])
        .output()
        .unwrap();
    assert_eq!(env_cap.status.code(), Some(3));

    assert_eq!(flipproc(&["compare", "triangle-removal.json"]).status.code(), Some(2));
    assert_eq!(flipproc(&["classes", "--k", "3", "--bogus"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"order": 3, "entries": [{"from": 7, "to": 0, "p": "1/2"}], "default": "identity"}"#).unwrap();
    assert_eq!(flipproc(&["coeffs", bad.to_str().unwrap()]).status.code(), Some(2));
}

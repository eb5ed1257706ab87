use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ssa-lab"));
    c.env_remove("SSA_LAB_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&o.stdout));
    })
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn diagonal_state(dims: &[usize]) -> String {
    let n: usize = dims.iter().product();
    let rows: Vec<Vec<[f64; 2]>> = (0..n)
        .map(|i| (0..n).map(|j| [if i == j { 1.0 / n as f64 } else { 0.0 }, 0.0]).collect())
        .collect();
    serde_json::json!({ "dims": dims, "matrix": rows }).to_string()
}

const GHZ: &str = r#"{"dims": [2, 2, 2], "vector": [[0.7071067811865476, 0], [0, 0], [0, 0], [0, 0],
    [0, 0], [0, 0], [0, 0], [0.7071067811865476, 0]]}"#;

#[test]
fn tgap_on_pure_state_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "ghz.json", GHZ);
    let o = run(&["tgap", f.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert!(v["t_a"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn entropy_of_reduction() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "ghz.json", GHZ);
    let o = run(&["entropy", f.to_str().unwrap(), "--keep", "0"]);
    assert_eq!(code(&o), 0);
    assert!((stdout_json(&o)["entropy"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn correlation_commands() {
    let dir = tempfile::tempdir().unwrap();
    let bell = write(
        dir.path(),
        "bell.json",
        r#"{"dims": [2, 2], "vector": [[0.7071067811865476, 0], [0, 0], [0, 0], [0.7071067811865476, 0]]}"#,
    );
    let b = bell.to_str().unwrap();
    let d = stdout_json(&run(&["discord", b, "--restarts", "4", "--seed", "1"]));
    assert!((d["discord"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let e = stdout_json(&run(&["eof", b]));
    assert!((e["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let ghz = write(dir.path(), "ghz.json", GHZ);
    let k = run(&["kw", ghz.to_str().unwrap(), "--restarts", "4"]);
    assert_eq!(code(&k), 0);
    assert!(stdout_json(&k)["gap"].as_f64().unwrap().abs() < 1e-4);
}

#[test]
fn build_then_certify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "spec.json",
        r#"{"blocks": [
            {"weight": 0.4, "psi": {"dims": [2, 1, 1], "vector": [[0.6, 0], [0.8, 0]]},
             "rhoZ": {"dims": [1, 1], "matrix": [[[1, 0]]]},
             "partition": [1, 1, 1, 1], "embedB": 0, "embedC": 0},
            {"weight": 0.6, "psi": {"dims": [2, 2, 1], "vector": [[0.6, 0], [0, 0], [0, 0], [0, 0.8]]},
             "rhoZ": {"dims": [1, 2], "matrix": [[[0.3, 0], [0, 0]], [[0, 0], [0.7, 0]]]},
             "partition": [2, 1, 1, 2], "embedB": 1, "embedC": 1}
        ]}"#,
    );
    let built = run(&["build", spec.to_str().unwrap()]);
    assert_eq!(code(&built), 0, "{}", String::from_utf8_lossy(&built.stderr));
    let state = dir.path().join("state.json");
    fs::write(&state, &built.stdout).unwrap();
    let o = run(&["certify", state.to_str().unwrap(), spec.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["passed"], Value::Bool(true));

    let pure = run(&["build", spec.to_str().unwrap(), "--purify"]);
    assert_eq!(code(&pure), 0);
    assert_eq!(stdout_json(&pure)["dims"], serde_json::json!([2, 3, 3, 3]));
}

#[test]
fn worked_example_fails_certification() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("s.json");
    fs::write(&state, run(&["build", "--example3"]).stdout).unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, run(&["build", "--example3", "--emit-spec"]).stdout).unwrap();
    let o = run(&["certify", state.to_str().unwrap(), spec.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert_eq!(v["orthogonality"]["passed"], Value::Bool(false));
    // λ1 b β2² at the defaults
    let want = 0.5 * std::f64::consts::FRAC_1_SQRT_2 * 0.25;
    assert!((v["orthogonality"]["witness"].as_f64().unwrap() - want).abs() < 1e-12);
}

#[test]
fn sweep_csv_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let o = run(&["sweep", "--figure", "a", "--steps", "8", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("param1,param2,t_closed,t_numeric"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 64);
    for r in rows {
        let f: Vec<f64> = r.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(f.len(), 4);
        assert!((f[2] - f[3]).abs() < 1e-8);
    }
    let custom = run(&["sweep", "--axis1", "b:0:1:3", "--axis2", "lambda1:0.2:0.8:2", "--param", "beta2=0.3"]);
    assert_eq!(code(&custom), 0);
    assert_eq!(String::from_utf8(custom.stdout).unwrap().lines().count(), 7);
}

#[test]
fn campaign_is_clean_and_deterministic() {
    let args = ["campaign", "--checks", "ssa,concavity", "--n", "300", "--dims", "2,2,2", "--seed", "7"];
    let a = bin().args(args).env("SSA_LAB_THREADS", "1").output().unwrap();
    let b = bin().args(args).env("SSA_LAB_THREADS", "0").output().unwrap();
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("check,sample,value,threshold,violation"));
    assert_eq!(text.lines().count(), 601);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",false")));
}

#[test]
fn campaign_correlation_checks() {
    let o = run(&["campaign", "--checks", "conservation,kw", "--n", "5", "--seed", "3", "--restarts", "6"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn campaign_violation_exits_one() {
    // |lhs - rhs| <= 0 cannot survive roundoff
    let o = run(&["campaign", "--checks", "conservation", "--n", "2", "--seed", "1", "--restarts", "4", "--tol", "0"]);
    assert_eq!(code(&o), 1);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().skip(1).any(|l| l.ends_with(",true")));
    // a malformed bound is rejected before sampling
    let o = run(&["campaign", "--checks", "sa", "--n", "3", "--seed", "1", "--tol", "-1"]);
    assert_eq!(code(&o), 1);
    assert!(o.stdout.is_empty());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = write(dir.path(), "bad.json", "{\"dims\": [2], \"matrix\": [[[1, 0]");
    let o = run(&["tgap", garbage.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));

    let not_density = write(dir.path(), "neg.json", r#"{"dims": [2], "matrix": [[[1.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]]}"#);
    assert_eq!(code(&run(&["entropy", not_density.to_str().unwrap()])), 1);

    // d_A = 3 is outside the Koashi-Winter routine's reach
    let qutrit = write(dir.path(), "q.json", &diagonal_state(&[3, 2, 2]));
    assert_eq!(code(&run(&["kw", qutrit.to_str().unwrap()])), 2);
    // roof limited to total dimension 16
    let big = write(dir.path(), "big.json", &diagonal_state(&[4, 5]));
    assert_eq!(code(&run(&["eof", big.to_str().unwrap(), "--roof"])), 2);

    assert_eq!(code(&run(&["campaign", "--checks", "ssa"])), 1, "seed is required");
    assert_eq!(code(&run(&["campaign", "--checks", "nope", "--seed", "1"])), 1);
    assert_eq!(code(&run(&["no-such-command"])), 1);
    assert_eq!(code(&run(&["tgap", "/nonexistent/state.json"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);

    let o = bin().args(["tgap", "x"]).env("SSA_LAB_THREADS", "lots").output().unwrap();
    assert_eq!(code(&o), 1);
}

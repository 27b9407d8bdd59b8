use std::fs;
use std::process::{Command, Output};

fn copeland(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_copeland"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn datasets_listing() {
    let out = copeland(&["datasets"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("cyclic K=4 C=1 Condorcet=yes"));
    assert!(text.contains("multisol K=5 C=3 Condorcet=no"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn bounds_on_two_arm_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("2x2.csv");
    fs::write(&path, "0.5,0.6\n0.4,0.5\n").unwrap();
    let out = copeland(&["bounds", "--input", path.to_str().unwrap(), "--json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let lambda = v["lower_bound"]["constant"].as_f64().unwrap();
    let relaxed = v["ecw"]["constant"].as_f64().unwrap();
    // r(2,1) = 1/2 over d_KL(0.6, 1/2)
    let expected = 0.5 / (0.6f64 * 1.2f64.ln() + 0.4 * 0.8f64.ln());
    assert!((lambda - expected).abs() < 1e-9);
    assert!((relaxed - expected).abs() < 1e-9);
    assert_eq!(v["dataset"], "2x2");
    let text = stdout(&copeland(&["bounds", "--input", path.to_str().unwrap()]));
    assert!(text.contains("lambda (lower bound): 24.8"), "{text}");
    assert!(text.contains("lambda~ (ECW-RMED): 24.8"));
}

#[test]
fn bounds_multisol_equality_flag() {
    let text = stdout(&copeland(&["bounds", "--dataset", "multisol"]));
    assert!(text.contains("equal (C >= 2)"));
}

#[test]
fn exit_codes() {
    assert_eq!(copeland(&["run", "--algo", "cw", "--dataset", "sushi", "--T", "10", "--runs", "1"]).status.code(), Some(3));
    assert_eq!(copeland(&["bounds", "--input", "/nonexistent/m.csv"]).status.code(), Some(4));
    assert_eq!(copeland(&["bounds", "--dataset", "nope"]).status.code(), Some(2));
    assert_eq!(copeland(&["bounds", "--dataset", "arxiv"]).status.code(), Some(2));
    assert_eq!(copeland(&["run", "--dataset", "cyclic", "--alpha", "0"]).status.code(), Some(2));
    assert_eq!(copeland(&["bounds"]).status.code(), Some(2));
}

#[test]
fn asymmetric_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "0.5,0.7\n0.4,0.5\n").unwrap();
    let out = copeland(&["bounds", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("do not sum to one"));
}

#[test]
fn k_max_override_skips_lp() {
    let text = stdout(&copeland(&["bounds", "--dataset", "cyclic", "--k-max", "3"]));
    assert!(text.contains("skipped (K = 4 > K_max = 3)"), "{text}");
    assert!(text.contains("CCB bound: 1600"));
}

#[test]
fn run_random_writes_named_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = copeland(&[
        "run", "--algo", "random", "--dataset", "cyclic", "--T", "10000", "--runs", "20",
        "--out-dir", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let path = dir.path().join("cyclic_random_T10000_r20_s0.csv");
    let csv = fs::read_to_string(&path).unwrap();
    let last = csv.lines().last().unwrap();
    let mean: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((mean - 5000.0).abs() < 200.0, "{mean}");
    assert!(stdout(&out).contains("final mean regret"));
}

#[test]
fn failed_write_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("trace.csv");
    let out = copeland(&[
        "run", "--dataset", "cyclic", "--T", "100", "--runs", "2", "--out", target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(!target.exists());
}

#[test]
fn json_trace_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let out = copeland(&[
        "run", "--dataset", "multisol", "--T", "2000", "--runs", "3", "--seed", "5",
        "--format", "json", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let trace = copeland_rmed::harness::read_trace_json(fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(trace.runs.len(), 3);
    assert_eq!(trace.meta.master_seed, 5);
    assert_eq!(*trace.checkpoints.last().unwrap(), 2000);
}

#[test]
fn submatrix_from_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let sushi = dir.path().join("sushi.csv");
    fs::write(&sushi, copeland_rmed::datasets::Dataset::Sushi.csv()).unwrap();
    let sub = dir.path().join("sub.csv");
    let args = [
        "submatrix", "--input", sushi.to_str().unwrap(), "--k", "8", "--min-gap", "0.005",
        "--seed", "1", "--out", sub.to_str().unwrap(),
    ];
    assert!(copeland(&args).status.success());
    let first = fs::read_to_string(&sub).unwrap();
    let m = copeland_rmed::matrix::PreferenceMatrix::parse_csv(&first, copeland_rmed::matrix::TieMode::Strict).unwrap();
    assert_eq!(m.k(), 8);
    assert!(m.min_gap() >= 0.005);
    assert!(copeland(&args).status.success());
    assert_eq!(fs::read_to_string(&sub).unwrap(), first);
}

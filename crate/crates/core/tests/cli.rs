use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_segscore"))
}

fn run_in(dir: &Path, args: &[&str]) -> std::process::Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

#[test]
fn gamma_prints_closed_form_root() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["gamma", "--law", "gaussian_drift:mu=-0.5,sigma=1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let obj = v.as_object().unwrap();
    let mut keys: Vec<_> = obj.keys().cloned().collect();
    keys.sort();
    assert_eq!(keys, ["gamma", "rho", "s_at_min", "tolerance"]);
    assert!((v["gamma"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn simulate_is_deterministic_and_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str, workers: &str| {
        vec![
            "simulate".to_string(),
            "--law".into(),
            "gaussian_drift:mu=-0.5,sigma=1".into(),
            "--n".into(),
            "200".into(),
            "--x".into(),
            "13".into(),
            "--y".into(),
            "12".into(),
            "--paths".into(),
            "2000".into(),
            "--seed".into(),
            "42".into(),
            "--workers".into(),
            workers.into(),
            "--out".into(),
            out.into(),
        ]
    };
    for (out, w) in [("a/t.csv", "1"), ("b/t.csv", "1"), ("c/t.csv", "4")] {
        let a = args(out, w);
        let refs: Vec<&str> = a.iter().map(String::as_str).collect();
        assert_eq!(run_in(dir.path(), &refs).status.code(), Some(0));
    }
    let read = |p: &str| std::fs::read(dir.path().join(p)).unwrap();
    assert_eq!(read("a/t.csv"), read("b/t.csv"));
    assert_eq!(read("a/t.csv"), read("c/t.csv"));
    let text = String::from_utf8(read("a/t.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("path_id,n,x,y,r_n,q_ny,o_xy,hit_time"));
    assert_eq!(text.lines().count(), 2001);
    let manifest: Value = serde_json::from_slice(&read("a/manifest.json")).unwrap();
    assert_eq!(manifest["seed"], 42);
    assert_eq!(manifest["command"], "simulate");
    assert!(manifest["wall_clock_seconds"].as_f64().is_some());
}

#[test]
fn replay_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["embed", "--t", "20", "--x", "3", "--paths", "500", "--seed", "7", "--out", "e/z.csv"],
    );
    assert_eq!(out.status.code(), Some(0));
    let first = std::fs::read(dir.path().join("e/z.csv")).unwrap();
    std::fs::rename(dir.path().join("e/manifest.json"), dir.path().join("m.json")).unwrap();
    std::fs::remove_file(dir.path().join("e/z.csv")).unwrap();
    assert_eq!(run_in(dir.path(), &["replay", "m.json"]).status.code(), Some(0));
    assert_eq!(std::fs::read(dir.path().join("e/z.csv")).unwrap(), first);
}

#[test]
fn spitzer_cf_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["spitzer-cf", "--law", "two_point_lattice:p=0.3", "--transform", "r", "--estimator", "exact", "--terms", "200", "--min", "0.5", "--max", "2", "--points", "4", "--out", "cf.csv"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("cf.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("arg,re,im,n_terms,tail_bound,mc_stderr,estimator"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[6], "exact_lattice");
    assert_eq!(row[3], "200");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // usage
    assert_eq!(run_in(dir.path(), &["simulate", "--n", "10"]).status.code(), Some(2));
    assert_eq!(run_in(dir.path(), &["frobnicate"]).status.code(), Some(2));
    // configuration: positive drift has no Cramér root
    assert_eq!(run_in(dir.path(), &["gamma", "--law", "gaussian_drift:mu=0.5,sigma=1"]).status.code(), Some(2));
    assert_eq!(
        run_in(dir.path(), &["verify", "oracle", "--law", "gaussian_drift:mu=-0.5,sigma=1", "--paths", "10"]).status.code(),
        Some(2)
    );
    // runtime: step cap exceeded under direct passage
    let capped = run_in(
        dir.path(),
        &["simulate", "--n", "1", "--x", "20", "--y", "0", "--paths", "5", "--passage", "direct", "--max-steps", "5"],
    );
    assert_eq!(capped.status.code(), Some(3));
    // test failure: an impossible threshold
    let strict = run_in(
        dir.path(),
        &["verify", "factorization", "--n", "50", "--level", "6", "--paths", "500", "--threshold", "1e-9"],
    );
    assert_eq!(strict.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&strict.stdout).unwrap();
    assert_eq!(report["ks"]["pass"], false);
}

#[test]
fn verify_writes_report_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["verify", "oracle", "--n", "10", "--paths", "20000", "--seed", "3", "--out", "r/oracle.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&std::fs::read(dir.path().join("r/oracle.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["rows"].as_array().unwrap().len(), 11);
    assert!(dir.path().join("r/manifest.json").exists());
}

//! End-to-end behaviour of the `hpw` binary: exit codes, determinism and output layout.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};

const BIN: &str = env!("CARGO_BIN_EXE_hpw");

/// A small but complete configuration so each command finishes in seconds.
fn small_config(dir: &Path) -> PathBuf {
    let cfg = json!({
        "group": { "kind": "heisenberg", "n": 1 },
        "cutoff": 8,
        "grid": { "lambda_min": 0.05, "lambda_max": 8.0, "panels": 2, "nodes_per_panel": 4 },
        "quad": { "pq_nodes": 48, "t_nodes": 32 },
        "inequality": { "p": [1.0, 1.5], "beta": [1.0, 3.0], "gamma": [1.0] },
        "family": [
            { "a": 0.5, "b": 0.5 },
            { "a": 0.5, "b": 0.5, "modulation": [0.2] },
            { "a": 0.5, "b": 0.5, "shift_v": [0.4, 0.0] }
        ],
        "dilations": [[5.0, 2.0]],
        "tail_levels": { "min": 0.5, "max": 10.0, "count": 9 },
        "estimate": {
            "p": 1.5, "beta": 1.0, "gamma": 1.0,
            "family": {
                "lower": [-2.3, -2.3, -0.3, -1.0],
                "upper": [0.69, 0.69, 0.3, 1.0],
                "start": [-0.69, -0.69, 0.0, 0.0]
            },
            "budget": 6,
            "initial_step": 0.25
        },
        "out": dir.join("out"),
        "seed": 7
    });
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_vec_pretty(&cfg).unwrap()).unwrap();
    path
}

fn hpw(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).env_remove("HPW_THREADS").output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn run_ok(args: &[&str]) -> String {
    let (code, stdout, stderr) = hpw(args);
    assert_eq!(code, 0, "hpw {args:?} failed:\n{stdout}\n{stderr}");
    stdout
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let cfg = cfg.to_str().unwrap();
    assert_eq!(hpw(&["calibrate", "--config", "/nonexistent/config.json"]).0, 2);
    assert_eq!(hpw(&["frobnicate"]).0, 2);
    assert_eq!(hpw(&["sweep"]).0, 2);
    assert_eq!(hpw(&["verify", "--config", cfg, "--suite", "nope"]).0, 2);
    assert_eq!(hpw(&["calibrate", "--config", cfg, "--set", "cutoff=-3"]).0, 2);
    assert_eq!(hpw(&["calibrate", "--config", cfg, "--set", "mystery=1"]).0, 2);
    assert_eq!(hpw(&["sweep", "--config", cfg, "--set", "inequality.beta=[0.1]"]).0, 2);
    assert_eq!(hpw(&["--help"]).0, 0);
}

#[test]
fn bad_thread_count_is_an_environment_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = Command::new(BIN)
        .args(["verify", "--config", cfg.to_str().unwrap(), "--suite", "group"])
        .env("HPW_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn calibration_is_deterministic_and_sidecar_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let cfg_s = cfg.to_str().unwrap();
    let sidecar = dir.path().join("out/calibration.json");

    // sidecar-dependent suites refuse to run without one
    assert_eq!(hpw(&["verify", "--config", cfg_s, "--suite", "fourier"]).0, 3);

    run_ok(&["calibrate", "--config", cfg_s]);
    let first = std::fs::read(&sidecar).unwrap();
    run_ok(&["calibrate", "--config", cfg_s]);
    assert_eq!(first, std::fs::read(&sidecar).unwrap(), "sidecar bytes differ between identical runs");
    let sc = read_json(&sidecar);
    assert_eq!(sc["format"], "hpw-calibration/1");
    assert!(sc["calibration"]["constants"]["plancherel_c"].as_f64().unwrap() > 0.0);

    // a different discretization invalidates the sidecar
    assert_eq!(hpw(&["verify", "--config", cfg_s, "--suite", "hpw", "--set", "cutoff=10"]).0, 3);

    std::fs::write(&sidecar, &first[..first.len() / 2]).unwrap();
    assert_eq!(hpw(&["verify", "--config", cfg_s, "--suite", "fourier"]).0, 3);
    let mut doc: Value = serde_json::from_slice(&first).unwrap();
    doc["calibration"]["constants"]["plancherel_c"] = json!(-1.0);
    std::fs::write(&sidecar, serde_json::to_vec(&doc).unwrap()).unwrap();
    assert_eq!(hpw(&["verify", "--config", cfg_s, "--suite", "fourier"]).0, 3);
}

#[test]
fn verify_writes_one_record_per_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let stdout = run_ok(&["verify", "--config", cfg.to_str().unwrap(), "--suite", "schatten"]);
    assert!(stdout.contains("0 failed"));
    let text = std::fs::read_to_string(dir.path().join("out/verify_schatten.jsonl")).unwrap();
    let records: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(!records.is_empty());
    assert!(records.iter().all(|r| r["suite"] == "schatten" && r["passed"] == true && r["seed"] == 7));
}

#[test]
fn sweep_and_estimate_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let cfg_s = cfg.to_str().unwrap();
    let out = dir.path().join("out");
    run_ok(&["calibrate", "--config", cfg_s]);
    run_ok(&["sweep", "--config", cfg_s]);

    let summary = read_json(&out.join("sweep_summary.json"));
    // (p, beta) = (1, 1) is inadmissible on the first Heisenberg group
    assert_eq!(summary["skipped"].as_array().unwrap().len(), 1);
    assert_eq!(summary["rows"], 3 * 3 * 2);
    assert!(summary["max_dilation_residual"].as_f64().unwrap() < 1e-6);

    let mut rdr = csv::Reader::from_path(out.join("sweep.csv")).unwrap();
    let header = rdr.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 18);
    let key = |r: &csv::StringRecord| -> Vec<f64> {
        ["p", "beta", "gamma", "family_index", "dilation_index"].iter().map(|c| r[col(c)].parse().unwrap()).collect()
    };
    for w in rows.windows(2) {
        assert!(key(&w[0]) < key(&w[1]), "rows out of order");
    }
    for r in &rows {
        let ratio: f64 = r[col("ratio")].parse().unwrap();
        assert!(ratio > 0.0 && ratio.is_finite());
        assert_eq!(&r[col("seed")], "7");
        assert_eq!(&r[col("cutoff")], "8");
    }
    let jsonl = std::fs::read_to_string(out.join("sweep.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 18);
    assert!(out.join("plot.csv").is_file());

    run_ok(&["estimate", "--config", cfg_s]);
    let est = read_json(&out.join("estimate.json"));
    let min = est["report"]["min_ratio"].as_f64().unwrap();
    let matching = rows.iter().filter(|r| {
        let k = key(r);
        k[0] == 1.5 && k[1] == 1.0 && k[2] == 1.0 && k[4] == 0.0
    });
    for r in matching {
        let ratio: f64 = r[col("ratio")].parse().unwrap();
        assert!(min <= ratio * (1.0 + 1e-12), "estimate {min} above sweep row {ratio}");
    }
    let traj = est["report"]["trajectory"].as_array().unwrap();
    assert_eq!(traj.len(), est["report"]["evaluations"].as_u64().unwrap() as usize);
    assert!(traj.len() <= 6);
}

#[test]
fn singleton_grid_and_unit_budget() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let cfg_s = cfg.to_str().unwrap();
    let sets = [
        "inequality={\"p\":[1.5],\"beta\":[1.0],\"gamma\":[1.0]}",
        "family=[{\"a\":0.5,\"b\":0.5}]",
        "dilations=[]",
        "estimate.budget=1",
    ];
    let mut args = vec!["sweep", "--config", cfg_s];
    for s in &sets {
        args.extend(["--set", s]);
    }
    let stdout = run_ok(&args);
    assert!(stdout.starts_with("1 rows"), "{stdout}");
    args[0] = "estimate";
    run_ok(&args);
    let est = read_json(&dir.path().join("out/estimate.json"));
    assert_eq!(est["report"]["evaluations"], 1);
    assert_eq!(est["report"]["trajectory"].as_array().unwrap().len(), 1);
}

#[test]
fn out_and_seed_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let other = dir.path().join("elsewhere");
    run_ok(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--suite",
        "group",
        "--out",
        other.to_str().unwrap(),
        "--seed",
        "11",
    ]);
    let text = std::fs::read_to_string(other.join("verify_group.jsonl")).unwrap();
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["seed"], 11);
    assert!(!dir.path().join("out").exists());
}

use std::path::Path;
use std::process::Command;

use nsrw_cli::{load_checkpoint, parse_config_str, run_experiment, run_experiment_with_threads};
use serde_json::{json, Value};

fn write_config(dir: &Path, value: &Value) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn small_solve() -> Value {
    json!({
        "d": 2, "N": 32, "s": 0.25, "T": 0.2, "dt": 0.005,
        "draws": 3, "cutoffs": [8.0, 10.0], "snapshot_cadence": 10,
        "master_seed": 4, "data": { "kind": "rough", "seed": 9 }
    })
}

#[test]
fn binary_runs_solve_and_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &small_solve());
    let out = tmp.path().join("run");
    let status = Command::new(env!("CARGO_BIN_EXE_nsrw"))
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--seed", "77"])
        .env("NSRW_THREADS", "2")
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    for name in ["series.csv", "summary.json", "meta.json", "plotdata/lambda.tsv", "checkpoints/draw2_cut1_final.bin"] {
        assert!(out.join(name).exists(), "missing {name}");
    }
    let summary = read_json(&out.join("summary.json"));
    // flag beats file
    assert_eq!(summary["master_seed"], 77);
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["results"]["runs"].as_array().unwrap().len(), 6);
    assert_eq!(read_json(&out.join("meta.json"))["worker_threads"], 2);

    let series = std::fs::read_to_string(out.join("series.csv")).unwrap();
    let header = series.lines().next().unwrap();
    assert!(header.starts_with("draw,cutoff,time,kinetic"));
    // 3 draws x 2 cutoffs x 5 snapshots (t = 0, 0.05, ..., 0.2)
    assert_eq!(series.lines().count(), 1 + 6 * 5);
}

#[test]
fn binary_reports_bad_config_field() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small_solve();
    cfg["q"] = json!(1.5);
    let path = write_config(tmp.path(), &cfg);
    let out = Command::new(env!("CARGO_BIN_EXE_nsrw"))
        .args(["solve", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`q`"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn failed_assertion_sets_exit_code_and_summary() {
    // ten Gaussian draws cannot pin the second moment to 5%
    let tmp = tempfile::tempdir().unwrap();
    let cfg = json!({ "d": 2, "N": 16, "s": 0.25, "monte_carlo_M": 10, "master_seed": 1 });
    let path = write_config(tmp.path(), &cfg);
    let out_dir = tmp.path().join("run");
    let out = Command::new(env!("CARGO_BIN_EXE_nsrw"))
        .args(["randomize", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let summary = read_json(&out_dir.join("summary.json"));
    assert_eq!(summary["passed"], false);
    assert!(summary["failures"][0].as_str().unwrap().contains("second moment"));
}

fn config_in(dir: &Path, mut value: Value) -> nsrw_cli::ExperimentConfig {
    value["output_dir"] = json!(dir);
    parse_config_str(&value.to_string()).unwrap()
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let tmp = tempfile::tempdir().unwrap();
    let mut solve = small_solve();
    solve["experiment"] = json!("solve");
    let tails = json!({
        "experiment": "tails", "d": 2, "N": 16, "s": 0.25, "gamma": 0.0,
        "monte_carlo_M": 200, "time_points": 8, "master_seed": 3
    });
    for (name, base) in [("solve", solve), ("tails", tails)] {
        let mut files = Vec::new();
        for threads in [1, 2, 8] {
            let cfg = config_in(&tmp.path().join(format!("{name}{threads}")), base.clone());
            run_experiment_with_threads(&cfg, threads).unwrap();
            let read = |f: &str| std::fs::read(cfg.output_dir.join(f)).unwrap();
            files.push((read("series.csv"), read("summary.json")));
        }
        assert!(files.windows(2).all(|w| w[0] == w[1]), "{name} differs across worker counts");
    }
}

#[test]
fn resumed_run_matches_uninterrupted_run() {
    let tmp = tempfile::tempdir().unwrap();
    let base = json!({
        "d": 2, "N": 32, "s": 0.25, "T": 0.4, "dt": 0.005, "cutoff": 10.0,
        "snapshot_cadence": 10, "checkpoint_at": 0.2, "master_seed": 2
    });
    let full = config_in(&tmp.path().join("full"), base.clone());
    run_experiment(&full).unwrap();
    let mid = full.output_dir.join("checkpoints/draw0_cut0_mid.bin");
    assert!((load_checkpoint(&mid).unwrap().t - 0.2).abs() < 1e-12);

    let mut resumed = base;
    resumed["resume_from"] = json!(mid);
    resumed.as_object_mut().unwrap().remove("checkpoint_at");
    let resumed = config_in(&tmp.path().join("resumed"), resumed);
    run_experiment(&resumed).unwrap();

    let a = load_checkpoint(&full.output_dir.join("checkpoints/draw0_cut0_final.bin")).unwrap();
    let b = load_checkpoint(&resumed.output_dir.join("checkpoints/draw0_cut0_final.bin")).unwrap();
    assert_eq!(a.t, b.t);
    let diff = a.field.sub(&b.field).unwrap().l2_norm();
    assert!(diff <= 1e-12 * a.field.l2_norm(), "{diff}");
}

#[test]
fn checkpoint_off_the_snapshot_grid_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config_in(
        tmp.path(),
        json!({ "d": 2, "N": 16, "s": 0.25, "T": 0.2, "dt": 0.01, "snapshot_cadence": 5, "checkpoint_at": 0.13 }),
    );
    let err = run_experiment(&cfg).unwrap_err().to_string();
    assert!(err.contains("checkpoint_at"), "{err}");
}

#[test]
fn heatflow_and_report_run() {
    let tmp = tempfile::tempdir().unwrap();
    let heat = config_in(
        &tmp.path().join("heat"),
        json!({ "experiment": "heatflow", "d": 2, "N": 64, "s": 0.4, "time_points": 24 }),
    );
    let out = run_experiment(&heat).unwrap();
    assert!(out.passed(), "{:?}", out.failures);
    assert_eq!(out.summary["results"]["decay"].as_array().unwrap().len(), 2);

    let report = config_in(
        &tmp.path().join("report"),
        json!({ "experiment": "report", "d": 2, "N": 16, "s": 0.25, "T": 0.5, "monte_carlo_M": 200 }),
    );
    let out = run_experiment(&report).unwrap();
    let lambda = &out.summary["results"]["lambda"];
    assert!(lambda["median"].as_f64().unwrap() > 0.0);
    assert!(lambda["p99"].as_f64().unwrap() >= lambda["median"].as_f64().unwrap());
}

//! End-to-end checks of the `clurep` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn clurep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clurep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(command: &str, config: &Path, out: &Path, extra: &[&str]) {
    let mut args = vec![command, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = clurep(&args);
    assert!(o.status.success(), "{command} failed: {}", String::from_utf8_lossy(&o.stderr));
}

fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

const LOCAL: &str = r#"{"seed": 11,
  "data": {"train": {"scenario": "local_f1", "n": 60}, "test": {"scenario": "local_f2", "n": 60}},
  "algorithm": {"algorithm": "kmeans", "k": 3}, "scores": ["ari"],
  "bootstrap": {"iterations": 12}, "anchors": [[-2, -2]]}"#;

#[test]
fn manifest_rerun_is_byte_identical_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "local.json", LOCAL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run_ok("local", &cfg, &a, &["--threads", "1"]);
    run_ok("local", &a.join("manifest.json"), &b, &["--threads", "3"]);
    assert_eq!(fs::read(a.join("scores.csv")).unwrap(), fs::read(b.join("scores.csv")).unwrap());
    assert_eq!(fs::read(a.join("summary.json")).unwrap(), fs::read(b.join("summary.json")).unwrap());
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 11);
    assert_eq!(manifest["threads"], 1);
    assert!(manifest["outputs"].as_array().unwrap().iter().any(|o| o["file"] == "scores.csv"));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "local.json", LOCAL);
    run_ok("local", &cfg, &dir.path().join("a"), &["--seed", "99"]);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seed"], 99);
}

#[test]
fn one_cell_grid_matches_local() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "local.json", LOCAL);
    let grid = write(
        dir.path(),
        "grid.json",
        &LOCAL.replace(r#""anchors": [[-2, -2]]"#, r#""grid": {"x": [-2, -2], "y": [-2, -2], "resolution": [1, 1]}"#),
    );
    run_ok("local", &cfg, &dir.path().join("l"), &[]);
    run_ok("grid", &grid, &dir.path().join("g"), &[]);
    let l = rows(&dir.path().join("l/scores.csv"));
    let g = rows(&dir.path().join("g/scores.csv"));
    assert_eq!(g.len(), 1);
    // local: score_kind, anchor, point, mean, sd; grid: score_kind, index, point, mean, sd
    assert_eq!(l[0][..5], g[0][..5]);
}

#[test]
fn identical_studies_without_resampling_score_one() {
    let dir = tempfile::tempdir().unwrap();
    let study = r#"{"scenario": "local_f1", "n": 50, "stream": 4}"#;
    let cfg = write(
        dir.path(),
        "ms.json",
        &format!(
            r#"{{"data": {{"studies": [{study}, {study}]}}, "algorithm": {{"k": 3}},
               "bootstrap": {{"iterations": 3, "resample": false}}}}"#
        ),
    );
    run_ok("multistudy", &cfg, &dir.path().join("o"), &[]);
    for r in rows(&dir.path().join("o/scores.csv")) {
        assert_eq!(r[5], "1", "{r:?}");
        assert_eq!(r[10] == "true", r[3] == r[4]);
    }
    assert!(dir.path().join("o/heat_kmeans_k3_ari.svg").exists());
}

#[test]
fn single_iteration_reports_zero_sd() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.json",
        r#"{"data": {"split": {"scenario": "local_f1", "n": 80}}, "k": [2, 3], "bootstrap": {"iterations": 1}, "svg": false}"#,
    );
    run_ok("sweep-k", &cfg, &dir.path().join("o"), &[]);
    let r = rows(&dir.path().join("o/scores.csv"));
    assert_eq!(r.len(), 4);
    assert!(r.iter().all(|row| row[4] == "0" && row[7] == "1"));
}

#[test]
fn csv_sources_load_relative_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let mut body = String::from("x,y,label\n");
    for i in 0..40 {
        let c = if i % 2 == 0 { 0.0 } else { 10.0 };
        body.push_str(&format!("{},{},{}\n", c + (i as f64) * 0.01, c, i % 2));
    }
    write(dir.path(), "data.csv", &body);
    let cfg = write(
        dir.path(),
        "p.json",
        r#"{"data": {"split": {"csv": "data.csv", "label_column": "label"}}, "algorithm": {"k": 2},
            "bootstrap": {"iterations": 5}}"#,
    );
    run_ok("pairwise", &cfg, &dir.path().join("o"), &[]);
    let r = rows(&dir.path().join("o/scores.csv"));
    assert_eq!(r.len(), 10);
    assert!(r.iter().all(|row| row[2] == "1"));
}

fn expect_config_error(command: &str, config: &str) {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("data.csv"), "a,b,c\n1,2,3\n4,5,6\n7,8,9\n").unwrap();
    let cfg = write(dir.path(), "c.json", config);
    let out = dir.path().join("o");
    let o = clurep(&[command, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).expect("error JSON on stderr");
    assert_eq!(err["error"]["kind"], "config");
    assert!(!out.join("manifest.json").exists());
}

#[test]
fn calibrate_rejects_csv_sources() {
    expect_config_error(
        "calibrate",
        r#"{"data": {"train": {"csv": "data.csv"}, "test": {"csv": "data.csv"}}, "algorithm": {"k": 2}}"#,
    );
}

#[test]
fn grid_svg_needs_two_dimensions() {
    expect_config_error(
        "grid",
        r#"{"data": {"train": {"csv": "data.csv"}, "test": {"csv": "data.csv"}}, "algorithm": {"k": 1},
            "anchors": [[1, 2, 3]]}"#,
    );
}

#[test]
fn grid_without_svg_accepts_any_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "g.json",
        r#"{"data": {"train": {"scenario": "nocluster_gauss", "n": 40, "params": {"dim": 3}},
                     "test": {"scenario": "nocluster_gauss", "n": 40, "params": {"dim": 3}}},
            "algorithm": {"k": 2}, "anchors": [[0, 0, 0], [1, 1, 1]], "svg": false,
            "bootstrap": {"iterations": 4}}"#,
    );
    run_ok("grid", &cfg, &dir.path().join("o"), &[]);
    assert_eq!(rows(&dir.path().join("o/scores.csv")).len(), 4);
}

#[test]
fn unknown_fields_and_bad_flags_fail_cleanly() {
    expect_config_error("pairwise", r#"{"bootstrp": {}}"#);
    let o = clurep(&["frobnicate", "--config", "x.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(serde_json::from_slice::<serde_json::Value>(&o.stderr).is_ok());
}

#[test]
fn baseline_zero_perturbation_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "b.json",
        r#"{"data": {"train": {"scenario": "local_f1", "n": 90}}, "algorithm": {"k": 3},
            "baseline": {"perturb": {"noise_variance": 0.0, "iterations": 4}, "alpha": 1.0}}"#,
    );
    run_ok("baseline", &cfg, &dir.path().join("o"), &[]);
    for r in rows(&dir.path().join("o/scores.csv")) {
        let expected = match r[0].as_str() {
            "stability_mmd" | "mcshane_d" | "mcshane_d_relative" => "0",
            _ => "1",
        };
        assert_eq!(r[4], expected, "{r:?}");
    }
}

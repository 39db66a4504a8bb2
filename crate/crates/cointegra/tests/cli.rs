//! End-to-end tests of the `cointegra` binary: exit codes, config error
//! diagnostics, and byte-identical artifact determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cointegra"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path
}

const OU_COINT_MEASURE: &str = r#"{
  "measure": {
    "dim": 2,
    "atoms": [ { "t": 0.0, "A": [[-1.0, 1.0], [0.0, 0.0]] } ],
    "density": { "kind": "none" },
    "decay_rate": 1.0
  }
}"#;

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

#[test]
fn analyze_cointegrated_ou() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), OU_COINT_MEASURE);
    let out = run(&[
        "analyze",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("out/analyze.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["structure"]["rank"], 1);
    assert_eq!(doc["report"]["verdict"], "Cointegrated");
}

#[test]
fn missing_config_flag_is_exit_2() {
    let out = run(&["analyze"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--config"), "stderr: {err}");
}

#[test]
fn missing_field_names_the_field_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    // simulate requires a seed; this config has none
    let cfg = write_config(dir.path(), OU_COINT_MEASURE);
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("seed"), "stderr: {err}");
}

#[test]
fn unknown_field_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{ "measure": { "dim": 1, "atoms": [], "density": { "kind": "none" }, "decay_rate": 1.0, "typo_field": 3 } }"#,
    );
    let out = run(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("typo_field"), "stderr: {err}");
}

#[test]
fn simulate_artifacts_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(
            r#"{{ "measure": {},
                 "seed": 42, "step": 0.01, "t_max": 2.0, "paths": 4 }}"#,
            &OU_COINT_MEASURE[14..OU_COINT_MEASURE.len() - 1]
        ),
    );
    let mut bytes = Vec::new();
    for name in ["a", "b"] {
        let out_dir = dir.path().join(name);
        let out = run(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let mut blob = Vec::new();
        for f in ["paths.csv", "variance.csv", "simulate_report.json"] {
            blob.extend(fs::read(out_dir.join(f)).unwrap());
        }
        bytes.push(blob);
    }
    assert_eq!(bytes[0], bytes[1], "artifacts differ between identical runs");
}

#[test]
fn seed_flag_overrides_config_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(
            r#"{{ "measure": {},
                 "seed": 42, "step": 0.01, "t_max": 2.0, "paths": 2 }}"#,
            &OU_COINT_MEASURE[14..OU_COINT_MEASURE.len() - 1]
        ),
    );
    let mut outputs = Vec::new();
    for (name, extra) in [("a", None), ("b", Some(("--seed", "43")))] {
        let out_dir = dir.path().join(name);
        let mut args = vec![
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ];
        if let Some((f, v)) = extra {
            args.push(f);
            args.push(v);
        }
        let out = run(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(fs::read(out_dir.join("paths.csv")).unwrap());
    }
    assert_ne!(outputs[0], outputs[1], "seed override had no effect");
}

#[test]
fn var_oracle_writes_granger_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{ "var": { "dim": 1, "p": 1, "Gamma": [[[0.5]]], "Sigma_eps": [[1.0]] },
             "seed": 7 }"#,
    );
    let out = run(&[
        "var-oracle",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out/granger.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("j,"));
    // first data row is C0 (j = -1); for AR(1) with coefficient 0.5, C0 = 0
    assert!(csv.lines().nth(1).unwrap().starts_with("-1,"));
}

#[test]
fn mcarma_bridge_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{ "mcarma": { "dim": 2, "p": 2,
               "P": [[[1.0, -1.5], [0.0, 3.0]], [[0.0, -1.5], [0.0, 2.0]]],
               "Q": [[[1.0, 0.2], [0.0, 1.5]]] } }"#,
    );
    let out_dir = dir.path().join("out");
    let out = run(&[
        "mcarma",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // the bridged measure must itself be a loadable measure config
    let bridged = fs::read_to_string(out_dir.join("bridged_measure.json")).unwrap();
    let mc: cointegra::config::MeasureConfig = serde_json::from_str(&bridged).unwrap();
    mc.build().unwrap();
    let rep: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("mcarma_report.json")).unwrap())
            .unwrap();
    assert_eq!(rep["conditions"]["all_pass"], true);
    assert!(rep["c0_route_deviation"].as_f64().unwrap() < 1e-8);
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn nlfront(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlfront"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("diagnostic on stderr");
    serde_json::from_str(line).expect("diagnostic is JSON")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("result is JSON")
}

fn write_config(dir: &Path, config: &Value) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string(config).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

fn dir_arg(dir: &TempDir, leaf: &str) -> String {
    dir.path().join(leaf).to_string_lossy().into_owned()
}

#[test]
fn lists_eight_presets() {
    let out = nlfront(&["presets"]);
    assert!(out.status.success());
    let listing = String::from_utf8(out.stdout).unwrap();
    assert_eq!(listing.lines().count(), 8);
    for name in ["P1-spread", "P1-dichotomy", "accelerate", "appendixA"] {
        assert!(listing.contains(name), "{name} missing");
    }
}

#[test]
fn written_presets_load_back() {
    let tmp = TempDir::new().unwrap();
    let out = nlfront(&["presets", "--write", tmp.path().to_str().unwrap()]);
    assert!(out.status.success());
    let path = tmp.path().join("appendixA.json");
    let out = nlfront(&[
        "report",
        "--config",
        path.to_str().unwrap(),
        "--out",
        &dir_arg(&tmp, "a"),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout_json(&out)["result"]["residual_positive"], true);
}

#[test]
fn zero_diffusion_exits_two() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        &json!({"command": "eigen", "params": {"d1": 0.0, "d2": 0.0}}),
    );
    let out = nlfront(&["eigen", "--config", &config, "--out", &dir_arg(&tmp, "out")]);
    assert_eq!(out.status.code(), Some(2));
    let diag = stderr_json(&out);
    assert_eq!(diag["exit_code"], 2);
    assert!(
        diag["message"].as_str().unwrap().contains("d1 + d2 > 0"),
        "{diag}"
    );
}

#[test]
fn unknown_key_exits_two() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        &json!({"command": "eigen", "params": {"d3": 1.0}}),
    );
    let out = nlfront(&["eigen", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "config");
}

#[test]
fn command_must_match_config() {
    let out = nlfront(&["eigen", "--preset", "P1-spread"]);
    assert_eq!(out.status.code(), Some(2));
    let out = nlfront(&["report", "--preset", "no-such-preset"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spreading_preset_writes_trace() {
    let tmp = TempDir::new().unwrap();
    let out_dir = dir_arg(&tmp, "spread");
    let out = nlfront(&["report", "--preset", "P1-spread", "--out", &out_dir]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let result = stdout_json(&out);
    assert_eq!(result["exit_code"], 0);
    assert_eq!(result["preset"], "P1-spread");
    let regime: Value = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("spread/regime.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(regime["verdict"], "spreading");
    let trace = std::fs::read_to_string(tmp.path().join("spread/trace.csv")).unwrap();
    assert!(trace.starts_with("t,h,sup_u,sup_v,mass"));
    assert!(trace.lines().count() > 100);
}

#[test]
fn short_classification_is_undecided() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        &json!({
            "command": "classify",
            "params": {"d1": 6.0, "d2": 6.0, "mu1": 2.0, "mu2": 2.0},
            "numeric": {"t_max": 5.0}
        }),
    );
    let out = nlfront(&[
        "classify",
        "--config",
        &config,
        "--out",
        &dir_arg(&tmp, "out"),
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stdout_json(&out)["result"]["verdict"], "undecided");
    assert_eq!(stderr_json(&out)["exit_code"], 4);
}

#[test]
fn heavy_tail_speed_escapes() {
    let tmp = TempDir::new().unwrap();
    let cauchy = json!({"family": "cauchy", "scale": 1.0});
    let config = write_config(
        tmp.path(),
        &json!({
            "command": "semiwave",
            "params": {"kernel1": cauchy, "kernel2": cauchy},
            "numeric": {"sigma": 0.0, "length": 20.0}
        }),
    );
    let out = nlfront(&[
        "semiwave",
        "--config",
        &config,
        "--out",
        &dir_arg(&tmp, "out"),
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stderr_json(&out)["error"], "speed_escape");
}

#[test]
fn eigen_reports_constants() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        &json!({"command": "eigen", "numeric": {"l": 5.0, "cells": 100}}),
    );
    let out = nlfront(&["eigen", "--config", &config, "--out", &dir_arg(&tmp, "out")]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(tmp.path().join("out/eigenfunction.csv")).unwrap();
    assert!(csv.starts_with("x,phi1,phi2"));
    assert_eq!(csv.lines().count(), 101);
}

#[test]
fn decay_preset_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let run = |leaf: &str| {
        let out = nlfront(&[
            "evolve",
            "--preset",
            "decay-rates",
            "--out",
            &dir_arg(&tmp, leaf),
        ]);
        assert!(out.status.success());
        std::fs::read(tmp.path().join(leaf).join("evolve.csv")).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn seeded_starts_agree() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        &json!({"command": "steady", "numeric": {"l": 4.0, "cells": 60}, "study": {"starts": 5}}),
    );
    let run = |seed: &str| {
        let out = nlfront(&[
            "steady",
            "--config",
            &config,
            "--seed",
            seed,
            "--out",
            &dir_arg(&tmp, seed),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        stdout_json(&out)["result"].clone()
    };
    let a = run("1");
    let b = run("2");
    assert_eq!(a["seed"], 1);
    assert!(a["uniqueness_spread"].as_f64().unwrap() < 1e-8);
    assert!(b["uniqueness_spread"].as_f64().unwrap() < 1e-8);
    assert_eq!(a["interior"], b["interior"]);
}

#[test]
fn sweep_preset_is_monotone() {
    let tmp = TempDir::new().unwrap();
    let out = nlfront(&[
        "sweep",
        "--preset",
        "eigen-asymptotics",
        "--out",
        &dir_arg(&tmp, "out"),
    ]);
    assert!(out.status.success());
    let result = stdout_json(&out)["result"].clone();
    assert_eq!(result["monotone"], true);
    assert_eq!(result["same_sign"], true);
    assert_eq!(result["points"], 30);
}

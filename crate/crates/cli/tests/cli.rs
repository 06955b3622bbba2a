//! End-to-end checks of the command-line interface: exit codes, artifact
//! layout, thread-count determinism, and parity between the shipped
//! default configuration file and the built-in defaults.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mildcalc"))
}

fn write_small_config(dir: &Path, extra: &str) -> PathBuf {
    let path = dir.join("small.cfg");
    let body = format!(
        "steps = 1024\nn_paths = 8\nn_modes = 4\nexperiments = E1\n{extra}"
    );
    std::fs::write(&path, body).unwrap();
    path
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mildcalc-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn verify_small_run_exits_zero_and_writes_artifacts() {
    let dir = temp_dir("verify");
    let cfg = write_small_config(&dir, "");
    let out = dir.join("out");
    let status = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("summary.csv").exists());
    assert!(out.join("e1_detail.csv").exists());

    // report renders from the artifacts and carries the verdicts
    let report = bin().args(["report", "--out"]).arg(&out).output().unwrap();
    assert_eq!(report.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&report.stdout).contains("E1"));
}

#[test]
fn verify_is_thread_count_invariant_bytewise() {
    let dir = temp_dir("threads");
    let cfg = write_small_config(&dir, "");
    let run = |threads: &str, sub: &str| {
        let out = dir.join(sub);
        let status = bin()
            .args(["verify", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .args(["--threads", threads])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        (
            std::fs::read(out.join("summary.csv")).unwrap(),
            std::fs::read(out.join("e1_detail.csv")).unwrap(),
        )
    };
    let a = run("1", "a");
    let b = run("4", "b");
    assert_eq!(a.0, b.0, "summary.csv differs across thread counts");
    assert_eq!(a.1, b.1, "e1_detail.csv differs across thread counts");
}

#[test]
fn empty_experiment_list_exits_two() {
    let dir = temp_dir("empty");
    let cfg = dir.join("bad.cfg");
    std::fs::write(&cfg, "experiments = \n").unwrap();
    let status = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn unknown_config_key_exits_two_with_field_name() {
    let dir = temp_dir("badkey");
    let cfg = dir.join("bad.cfg");
    std::fs::write(&cfg, "frobnicate = 1\n").unwrap();
    let out = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("frobnicate"));
}

#[test]
fn simulate_writes_path_dumps() {
    let dir = temp_dir("simulate");
    let cfg = write_small_config(&dir, "");
    let out = dir.join("out");
    let status = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--paths", "2"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for name in ["x.csv", "y.csv", "stoch_int.csv", "noise.csv"] {
        let body = std::fs::read_to_string(out.join(name)).unwrap();
        assert!(body.starts_with("path_id,t,mode,value"), "{name}");
        assert!(body.lines().count() > 10, "{name} too short");
    }
}

#[test]
fn estimate_writes_battery_and_summary() {
    let dir = temp_dir("estimate");
    let cfg = write_small_config(&dir, "");
    let out = dir.join("out");
    let status = bin()
        .args(["estimate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let summary = std::fs::read_to_string(out.join("estimates_summary.csv")).unwrap();
    assert!(summary.starts_with("estimator,epsilon,median_sup_dev,fitted_rate"));
    assert!(summary.contains("forward_vs_ito"));
    assert!(summary.contains("remainder_a_eps"));
}

#[test]
fn shipped_default_config_matches_builtin_defaults() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.cfg");
    let text = std::fs::read_to_string(path).unwrap();
    let parsed = mildcalc::config::parse_config(&text).unwrap();
    assert_eq!(parsed, mildcalc::config::RunConfig::default());
}

//! End-to-end checks of the binary: exit-code mapping, deterministic
//! build outputs, and the files each subcommand leaves behind.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn capow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capow")).args(args).output().unwrap()
}

fn assert_exit(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn build_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let res = capow(&["--out", out.to_str().unwrap(), "--teams", "7", "build"]);
        assert_exit(&res, 0);
    }
    for name in ["scenario.json", "attenuation.bin"] {
        let left = fs::read(a.join(name)).unwrap();
        let right = fs::read(b.join(name)).unwrap();
        assert_eq!(left, right, "{name} differs between identical builds");
    }
}

#[test]
fn calibrate_writes_the_price() {
    let dir = tempfile::tempdir().unwrap();
    let res = capow(&["--out", dir.path().to_str().unwrap(), "--teams", "7", "calibrate"]);
    assert_exit(&res, 0);
    let text = fs::read_to_string(dir.path().join("calibration.json")).unwrap();
    assert!(text.contains("xi"));
}

#[test]
fn run_fixed_strategy_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let res = capow(&[
        "--out",
        dir.path().to_str().unwrap(),
        "--teams",
        "7",
        "run",
        "--strategy",
        "max",
    ]);
    assert_exit(&res, 0);
    assert!(dir.path().join("report_max.json").is_file());
    assert!(dir.path().join("throughput_max.csv").is_file());
}

#[test]
fn compare_writes_joined_csv() {
    let dir = tempfile::tempdir().unwrap();
    let res = capow(&["--out", dir.path().to_str().unwrap(), "--teams", "7", "compare"]);
    assert_exit(&res, 0);
    let csv = fs::read_to_string(dir.path().join("comparison.csv")).unwrap();
    for strategy in ["bps", "max", "min", "eicic", "lp_abs"] {
        assert!(csv.contains(strategy), "comparison.csv missing {strategy}");
    }
    assert!(dir.path().join("trace_bps.csv").is_file());
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let res = capow(&[
        "--out",
        dir.path().to_str().unwrap(),
        "--teams",
        "7",
        "sweep",
        "--parameter",
        "delta",
        "--values",
        "0,0.6",
    ]);
    assert_exit(&res, 0);
    let csv = fs::read_to_string(dir.path().join("sweep_delta.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3, "header plus one row per value");
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn missing_config_is_a_config_error() {
    let res = capow(&["--config", "/nonexistent/config.toml", "build"]);
    assert_exit(&res, 1);
}

#[test]
fn invalid_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "version = 1\n[solver]\nround_cap = 0\n",
    );
    let res = capow(&["--config", &cfg, "build"]);
    assert_exit(&res, 1);
}

#[test]
fn non_convergence_is_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    // One round can never complete the verification pass, so the solver
    // must report non-convergence.
    let cfg = write_config(
        dir.path(),
        &format!(
            "version = 1\n[solver]\nround_cap = 1\n[scenario]\nteam_count = 7\n[output]\ndirectory = \"{}\"\n",
            dir.path().join("out").display()
        ),
    );
    let res = capow(&["--config", &cfg, "run", "--strategy", "bps"]);
    assert_exit(&res, 2);
}

#[test]
fn oracle_guard_is_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    // Three carriers push the joint enumeration space past the guard.
    let cfg = write_config(
        dir.path(),
        &format!(
            "version = 1\n[verify]\ntoys = 1\ncarriers = 3\n[output]\ndirectory = \"{}\"\n",
            dir.path().join("out").display()
        ),
    );
    let res = capow(&["--config", &cfg, "verify"]);
    assert_exit(&res, 3);
}

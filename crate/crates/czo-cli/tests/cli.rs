//! End-to-end checks of the `czo` binary: config handling, flag precedence,
//! exit codes, and the harness sanity cases.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_czo")
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("czo-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn verify_with_zero_tolerance_fails_every_check() {
    let dir = scratch("tol0");
    let config = dir.join("config.toml");
    std::fs::write(&config, "[verify]\nn = 1\nlevels = 6\nd = 4\ntrials = 3\ntolerance = 0.0\n")
        .unwrap();
    let out = Command::new(bin())
        .args(["verify", "--config"])
        .arg(&config)
        .args(["--out"])
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert!(!out.status.success(), "zero tolerance must fail");
    // Every recorded check fails: floating point residuals are never 0.
    let csv = std::fs::read_to_string(dir.join("out/verify.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert!(rows.len() >= 10);
    for row in rows {
        assert!(row.contains(",false,"), "expected failure row, got {row}");
    }
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn verify_minimal_config_passes() {
    let dir = scratch("minimal");
    let config = dir.join("config.toml");
    std::fs::write(&config, "[verify]\nn = 1\nlevels = 1\nd = 1\ntrials = 3\ntolerance = 1e-10\n")
        .unwrap();
    let out = Command::new(bin())
        .args(["verify", "--config"])
        .arg(&config)
        .args(["--out"])
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "minimal sizes must pass: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = scratch("unknown");
    let config = dir.join("config.toml");
    std::fs::write(&config, "[verify]\nmystery-knob = 7\n").unwrap();
    let out = Command::new(bin())
        .args(["verify", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("mystery-knob") || err.contains("unknown"), "stderr: {err}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn seed_flag_overrides_config_file() {
    let dir = scratch("precedence");
    let config = dir.join("config.toml");
    std::fs::write(&config, "seed = 5\n[verify]\nn = 1\nlevels = 3\nd = 1\ntrials = 2\ntolerance = 1e-10\n")
        .unwrap();
    let run = |args: &[&str], out: &str| -> String {
        let status = Command::new(bin())
            .args(["verify", "--config"])
            .arg(&config)
            .args(args)
            .args(["--out"])
            .arg(dir.join(out))
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read_to_string(dir.join(out).join("verify.csv")).unwrap()
    };
    let from_file = run(&[], "a");
    let overridden = run(&["--seed", "9"], "b");
    let same_as_file = run(&["--seed", "5"], "c");
    assert_ne!(from_file, overridden, "flag must override the file seed");
    assert_eq!(from_file, same_as_file, "matching seed reproduces bytes");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn verify_runs_in_two_dimensions() {
    let dir = scratch("twodim");
    let config = dir.join("config.toml");
    std::fs::write(
        &config,
        "[verify]\nn = 2\nlevels = 3\nd = 2\ntrials = 3\ntolerance = 1e-10\n",
    )
    .unwrap();
    let out = Command::new(bin())
        .args(["verify", "--config"])
        .arg(&config)
        .args(["--out"])
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "two-dimensional verify failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    // The one-dimensional-only decomposition check is skipped at n = 2.
    let csv = std::fs::read_to_string(dir.join("out/verify.csv")).unwrap();
    assert!(!csv.contains("triple-decomposition"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn invalid_sizes_are_reported_as_config_errors() {
    let dir = scratch("invalid");
    let config = dir.join("config.toml");
    std::fs::write(&config, "[shift-avg]\nsamples = 500\n").unwrap();
    let out = Command::new(bin())
        .args(["shift-avg", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("power of two"));
    let _ = std::fs::remove_dir_all(&dir);
}

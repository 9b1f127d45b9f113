//! End-to-end tests of the binary: JSON summaries, exit codes, caching, and
//! byte-level determinism of the emitted files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_nodalheat")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nodalheat-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(out_dir: &Path, args: &[&str]) -> Output {
    Command::new(binary())
        .arg("--out-dir")
        .arg(out_dir)
        .args(args)
        .env_remove("NODALHEAT_CACHE")
        .output()
        .expect("binary runs")
}

fn json_field(stdout: &[u8], pointer: &str) -> serde_json::Value {
    let value: serde_json::Value = serde_json::from_slice(stdout).expect("stdout is JSON");
    value
        .pointer(pointer)
        .cloned()
        .unwrap_or(serde_json::Value::Null)
}

#[test]
fn signtest_reports_positive_integral() {
    let dir = tmp_dir("signtest");
    let out = run(&dir, &["signtest", "--p", "200", "--k", "2"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let u_phi = json_field(&out.stdout, "/results/integral_u_phi")
        .as_f64()
        .unwrap();
    assert!(u_phi > 0.0, "integral_u_phi = {u_phi}");
    let residual = json_field(&out.stdout, "/results/identity_residual")
        .as_f64()
        .unwrap();
    assert!(residual <= 1e-4);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn limit_spectrum_is_negative() {
    let dir = tmp_dir("limit");
    let out = run(&dir, &["spectrum", "--limit"]);
    assert!(out.status.success());
    let eigenvalue = json_field(&out.stdout, "/results/eigenvalue")
        .as_f64()
        .unwrap();
    assert!(eigenvalue < 0.0, "limit eigenvalue {eigenvalue}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn identical_configs_produce_identical_files() {
    let first = tmp_dir("det-a");
    let second = tmp_dir("det-b");
    for dir in [&first, &second] {
        let out = run(
            dir,
            &["stationary", "--p", "30", "--k", "2", "--nodes", "801"],
        );
        assert!(out.status.success());
    }
    for name in ["stationary-p30-K2.csv", "stationary-p30-K2.json"] {
        let a = std::fs::read(first.join(name)).unwrap();
        let b = std::fs::read(second.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
    let _ = std::fs::remove_dir_all(&first);
    let _ = std::fs::remove_dir_all(&second);
}

#[test]
fn second_run_hits_the_cache() {
    let dir = tmp_dir("cachehit");
    let out = run(&dir, &["energy", "--p", "20", "--k", "1", "--nodes", "801"]);
    assert!(out.status.success());
    let out = run(&dir, &["energy", "--p", "20", "--k", "1", "--nodes", "801"]);
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("cache hit"), "stderr: {stderr}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn verify_subset_passes() {
    let dir = tmp_dir("verify");
    let out = run(&dir, &["verify", "--only", "1,4"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("criterion 1: PASS"));
    assert!(stdout.contains("criterion 4: PASS"));
    assert!(dir.join("verify.json").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn invalid_exponent_exits_one() {
    let dir = tmp_dir("badp");
    let out = run(&dir, &["stationary", "--p", "0.5", "--k", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn unknown_flag_exits_one() {
    let dir = tmp_dir("badflag");
    let out = run(
        &dir,
        &["stationary", "--p", "3", "--k", "1", "--bogus", "1"],
    );
    assert_eq!(out.status.code(), Some(1));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn liouville_gaps_shrink_with_p() {
    let dir = tmp_dir("liouville");
    let gap_at = |p: &str| {
        let out = run(&dir, &["liouville", "--p", p, "--k", "2", "--nodes", "801"]);
        assert!(out.status.success());
        json_field(&out.stdout, "/results/sup_value_gap")
            .as_f64()
            .unwrap()
    };
    assert!(gap_at("100") < gap_at("25"));
    assert!(dir.join("liouville-p100-K2.csv").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn asymptotics_handles_small_exponents() {
    // Small p exercises the truncation at the true rescaled domain radius.
    let dir = tmp_dir("asym");
    let out = run(
        &dir,
        &[
            "asymptotics",
            "--k",
            "2",
            "--p-list",
            "3,6",
            "--nodes",
            "801",
            "--spectral-nodes",
            "2001",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = json_field(&out.stdout, "/results");
    assert_eq!(rows.as_array().unwrap().len(), 2);
    assert!(rows[0]["lambda1"].as_f64().unwrap() < 0.0);
    assert!(dir.join("asymptotics-K2.csv").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn scan_reports_boundaries() {
    let dir = tmp_dir("scan");
    let out = run(
        &dir,
        &[
            "scan",
            "--p",
            "30",
            "--k",
            "2",
            "--nodes",
            "1001",
            "--lambdas",
            "0.1,3",
        ],
    );
    assert!(out.status.success());
    let outcomes = json_field(&out.stdout, "/results/outcomes");
    assert_eq!(outcomes[0]["classification"], "GlobalDecay");
    assert_eq!(outcomes[1]["classification"], "Blowup");
    let below = json_field(
        &out.stdout,
        "/results/boundary_below_one/largest_global_decay",
    );
    assert_eq!(below.as_f64(), Some(0.1));
    let _ = std::fs::remove_dir_all(&dir);
}

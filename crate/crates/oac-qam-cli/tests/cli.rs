//! End-to-end tests of the binary: flags, exit codes, and file outputs.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_oac-qam"))
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn optimize_reports_an_asymmetric_design() {
    let out = bin()
        .args(["optimize", "--k", "100", "--q", "4", "--snr-db", "10"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("t*"));
    assert!(text.contains("closed-form MSE"));
    // d2*/d1* near 2.52 for this configuration.
    let ratio_line = text.lines().find(|l| l.contains("d2*/d1*")).unwrap();
    let ratio: f64 = ratio_line
        .split_whitespace()
        .last()
        .unwrap()
        .parse()
        .unwrap();
    assert!(ratio > 1.0, "quadrature spacing must dominate: {ratio}");
    assert!((ratio - 2.5203).abs() < 0.01);
}

#[test]
fn optimize_writes_a_json_record() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("design.json");
    let out = bin()
        .args(["optimize", "--k", "10", "--q", "8", "--gamma", "0.5"])
        .arg("--out")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(record["q"], 8);
    assert_eq!(record["method"], "large-k-root");
    let d1 = record["d1_star"].as_f64().unwrap();
    let d2 = record["d2_star"].as_f64().unwrap();
    assert!(d2 > d1);
    assert!(record["mse_optimized"].as_f64().unwrap() <= record["mse_equal"].as_f64().unwrap());
}

#[test]
fn degenerate_constellation_is_a_domain_error() {
    let out = bin()
        .args(["optimize", "--k", "5", "--q", "1", "--gamma", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("q must be >= 2"));
}

#[test]
fn missing_flags_are_usage_errors_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("never.dat");
    let out = bin()
        .args(["sweep", "--q", "4"]) // --k and --out missing
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!path.exists());

    let out = bin()
        .args(["optimize", "--k", "5", "--q", "4"]) // no gamma/snr
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    let out = bin()
        .args([
            "optimize", "--k", "5", "--q", "4", "--gamma", "1", "--snr-db", "3",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "gamma conflicts with snr-db");
}

#[test]
fn mse_evaluates_custom_spacings() {
    let out = bin()
        .args([
            "mse", "--k", "10", "--q", "4", "--snr-db", "10", "--d1", "0.3", "--d2", "0.5",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("optimized"));
    assert!(text.contains("custom"));

    // --d1 without --d2 is a usage error.
    let out = bin()
        .args([
            "mse", "--k", "10", "--q", "4", "--snr-db", "10", "--d1", "0.3",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

fn read_rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("xi_dB"))
        .map(|l| {
            l.split_whitespace()
                .map(|tok| tok.parse().unwrap())
                .collect()
        })
        .collect()
}

#[test]
fn sweep_writes_the_documented_schema() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.dat");
    let out = bin()
        .args([
            "sweep",
            "--k",
            "5",
            "--q",
            "4",
            "--trials",
            "500",
            "--seed",
            "9",
            "--snr-start",
            "0",
            "--snr-stop",
            "20",
            "--snr-step",
            "1",
        ])
        .arg("--out")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));

    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# oac-qam sweep"));
    assert_eq!(lines.next().unwrap(), "xi_dB mse_opt mse_eq se_opt se_eq");
    let rows = read_rows(&path);
    assert_eq!(rows.len(), 21);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), 5);
        assert_eq!(row[0], i as f64, "xi_dB echoes the requested grid");
        assert!(row.iter().all(|v| v.is_finite() && *v >= 0.0));
    }

    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("sweep.dat.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["trials"], 500);
    assert_eq!(manifest["seed"], 9);
    assert_eq!(manifest["mode"], "per-node-uniform");
}

#[test]
fn oversized_step_yields_a_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.dat");
    let out = bin()
        .args([
            "sweep",
            "--k",
            "3",
            "--q",
            "2",
            "--trials",
            "200",
            "--snr-start",
            "5",
            "--snr-stop",
            "20",
            "--snr-step",
            "50",
        ])
        .arg("--out")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = read_rows(&path);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], 5.0);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let out = bin()
        .args([
            "sweep",
            "--k",
            "3",
            "--q",
            "2",
            "--trials",
            "10",
            "--out",
            "/nonexistent-dir/sweep.dat",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn sweep_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = bin()
            .args([
                "sweep",
                "--k",
                "4",
                "--q",
                "4",
                "--trials",
                "1000",
                "--seed",
                "42",
                "--snr-step",
                "10",
            ])
            .arg("--out")
            .arg(&path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
        std::fs::read(&path).unwrap()
    };
    assert_eq!(run("a.dat"), run("b.dat"));
}

#[test]
fn sweep_is_reproducible_from_its_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("orig.dat");
    let out = bin()
        .args([
            "sweep",
            "--k",
            "6",
            "--q",
            "8",
            "--power",
            "2.5",
            "--trials",
            "800",
            "--seed",
            "77",
            "--snr-start",
            "2",
            "--snr-stop",
            "18",
            "--snr-step",
            "4",
            "--mode",
            "uniform-grid",
            "--baseline",
            "caption",
        ])
        .arg("--out")
        .arg(&first)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));

    // Re-run from nothing but the recorded manifest fields.
    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("orig.dat.manifest.json")).unwrap(),
    )
    .unwrap();
    let second = dir.path().join("replay.dat");
    let get = |key: &str| manifest[key].to_string();
    let out = bin()
        .args([
            "sweep",
            "--k",
            &get("k"),
            "--q",
            &get("q"),
            "--power",
            &get("power"),
            "--trials",
            &get("trials"),
            "--seed",
            &get("seed"),
            "--snr-start",
            &get("snr_start"),
            "--snr-stop",
            &get("snr_stop"),
            "--snr-step",
            &get("snr_step"),
            "--mode",
            manifest["mode"].as_str().unwrap(),
            "--baseline",
            manifest["baseline"].as_str().unwrap(),
        ])
        .arg("--out")
        .arg(&second)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap()
    );
}

#[test]
fn quick_validation_passes_and_fault_injection_fails() {
    let out = bin().args(["validate", "--quick"]).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("PASS  closed-form vs monte-carlo"));
    assert!(text.contains("all checks passed"));
    assert!(!text.contains("FAIL"));

    let out = bin()
        .args(["validate", "--quick", "--self-test-fault"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(5));
    assert!(stdout(&out).contains("FAIL  closed-form vs monte-carlo"));
}

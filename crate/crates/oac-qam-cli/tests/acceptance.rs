//! Acceptance criterion 8: `sweep` output is byte-identical across runs and
//! across `--workers` in {1, 4, 16} for a fixed seed.

use std::process::Command;

#[test]
fn acceptance_8_sweep_determinism_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let path = dir.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_oac-qam"))
            .args([
                "sweep",
                "--k",
                "10",
                "--q",
                "4",
                "--trials",
                "20000",
                "--seed",
                "31337",
                "--snr-start",
                "0",
                "--snr-stop",
                "20",
                "--snr-step",
                "5",
                "--workers",
                workers,
            ])
            .arg("--out")
            .arg(&path)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "ACCEPTANCE 8: FAIL sweep exited with {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        );
        std::fs::read(&path).unwrap()
    };

    let w1 = run("w1.dat", "1");
    let w1_again = run("w1b.dat", "1");
    let w4 = run("w4.dat", "4");
    let w16 = run("w16.dat", "16");

    assert_eq!(w1, w1_again, "ACCEPTANCE 8: FAIL rerun differs");
    assert_eq!(w1, w4, "ACCEPTANCE 8: FAIL 1 vs 4 workers differ");
    assert_eq!(w1, w16, "ACCEPTANCE 8: FAIL 1 vs 16 workers differ");
    println!(
        "ACCEPTANCE 8 sweep determinism: PASS ({} bytes identical across reruns and 1/4/16 workers)",
        w1.len()
    );
}

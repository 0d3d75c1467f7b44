//! End-to-end checks of the command-line surface: subcommands, flags,
//! exit codes, and emitted files.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fluid-doa"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const TINY_CONFIG: &str = r#"
master_seed = 11
trials = 4

[array]
mode = "ars"
num_antennas = 2
step = 0.5

[scene]
num_users = 2
paths_per_user = 1
doas_deg = [-30.0, 20.0]

[estimator]
variant = "tmrls-music"
grid_step_deg = 0.2

[sweep]
snr_db = [10.0]
num_blocks = [32]
num_movements = [1, 2]
"#;

#[test]
fn validate_accepts_presets_and_reports_ok() {
    let out = run(&["validate", "--preset", "fig6b"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("configuration ok"));
}

#[test]
fn config_errors_exit_with_code_two() {
    // neither --config nor --preset
    let out = run(&["rmse"]);
    assert_eq!(out.status.code(), Some(2));

    // unknown preset
    let out = run(&["validate", "--preset", "fig99"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown preset"));

    // invalid config content: too many paths for the aperture
    let dir = tempfile::tempdir().unwrap();
    let bad = TINY_CONFIG.replace("num_movements = [1, 2]", "num_movements = [0]");
    let path = dir.path().join("bad.toml");
    fs::write(&path, bad).unwrap();
    let out = run(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rmse_writes_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(&cfg, TINY_CONFIG).unwrap();
    let out_dir = dir.path().join("results");
    let out = run(&[
        "rmse",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--workers",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = fs::read_to_string(out_dir.join("rmse.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "snr_db,num_blocks,num_movements,rmse_deg,failures,mean_rho,trials"
    );
    assert_eq!(lines.count(), 2); // two movement counts, one snr, one block count

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "rmse");
    assert_eq!(manifest["master_seed"], 11);
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    assert!(manifest.get("workers").is_none());
}

#[test]
fn rmse_overrides_and_worker_independence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(&cfg, TINY_CONFIG).unwrap();

    let run_with = |label: &str, workers: &str| -> Vec<u8> {
        let out_dir = dir.path().join(label);
        let out = run(&[
            "rmse",
            "--config",
            cfg.to_str().unwrap(),
            "--trials",
            "6",
            "--seed",
            "77",
            "--workers",
            workers,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        fs::read(out_dir.join("rmse.csv")).unwrap()
    };
    let a = run_with("w1", "1");
    let b = run_with("w8", "8");
    assert_eq!(a, b);

    // the trial override landed in both table and manifest
    let text = String::from_utf8(a).unwrap();
    assert!(text.lines().nth(1).unwrap().ends_with(",6"));
}

#[test]
fn spectrum_emits_grid_and_peaks() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("spec");
    let out = run(&[
        "spectrum",
        "--preset",
        "fig6b",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("peaks (deg):"), "stdout: {text}");

    let csv = fs::read_to_string(out_dir.join("spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "angle_deg,spectrum");
    assert_eq!(lines.count(), 3600); // 0.05-degree grid
    assert!(Path::new(&out_dir.join("manifest.json")).exists());
}

#[test]
fn rho_surface_emits_cells() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(&cfg, TINY_CONFIG).unwrap();
    let out_dir = dir.path().join("rho");
    let out = run(&[
        "rho-surface",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("rho_surface.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "snr_db,num_blocks,mean_rho,trials");
    assert_eq!(lines.count(), 1);
}

#[test]
fn lags_prints_coverage() {
    let out = run(&["lags", "--preset", "fig6d"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("13 second-order difference lags"), "{text}");
    assert!(text.contains("-6..=6 (consecutive)"), "{text}");

    let out = run(&["lags", "--preset", "fig6b"]);
    let text = stdout(&out);
    assert!(text.contains("6 first-order lags"), "{text}");
    assert!(text.contains("0..=5 (consecutive)"), "{text}");
}

#[test]
fn grid_step_override_changes_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("coarse");
    let out = run(&[
        "spectrum",
        "--preset",
        "fig6c",
        "--grid-step",
        "0.5",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = fs::read_to_string(out_dir.join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count() - 1, 360);
}

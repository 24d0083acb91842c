use std::process::Command;

use double_irs::channel::ScenarioConfig;
use double_irs::experiments::{fig2a, read_csv, ExperimentConfig, Scheme, SweepKind};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_double-irs"))
}

#[test]
fn preset_writes_csv_with_theory_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2a.csv");
    let status = bin()
        .args([
            "fig2a",
            "--trials",
            "3",
            "--seed",
            "5",
            "--threads",
            "2",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let res = read_csv(&out).unwrap();
    for s in [Scheme::S1, Scheme::S2] {
        assert_eq!(res.series(s, "nmse_mc").len(), 9);
        assert_eq!(res.series(s, "nmse_theory").len(), 9);
    }
    assert!(res.rows.iter().all(|r| r.n_valid + r.n_degenerate == 3));
}

#[test]
fn run_subcommand_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        sweep: SweepKind::RateVsM,
        sweep_values: vec![2.0, 3.0],
        n_trials: 4,
        master_seed: 11,
        schemes: vec![Scheme::S2, Scheme::Single],
        ..fig2a(ScenarioConfig::standard(), 1, 0)
    };
    let cfg_path = dir.path().join("exp.json");
    std::fs::write(&cfg_path, cfg.to_json().unwrap()).unwrap();
    let output = bin()
        .args(["run", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert!(output.status.success());
    let mut expected = Vec::new();
    double_irs::experiments::write_csv(
        &double_irs::experiments::run_sweep(&cfg, Some(1)).unwrap(),
        &mut expected,
    )
    .unwrap();
    assert_eq!(output.stdout, expected);
}

#[test]
fn scenario_subcommand_prints_defaults() {
    let output = bin().arg("scenario").output().unwrap();
    assert!(output.status.success());
    let cfg = ScenarioConfig::from_json(std::str::from_utf8(&output.stdout).unwrap()).unwrap();
    assert_eq!(cfg, ScenarioConfig::standard());
}

#[test]
fn errors_are_reported() {
    let output = bin().arg("run").output().unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("--config"));

    let output = bin()
        .args(["fig2b", "--config", "/nonexistent/scenario.json"])
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("/nonexistent/scenario.json"));
}

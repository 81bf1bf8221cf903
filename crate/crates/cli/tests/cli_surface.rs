//! End-to-end checks of the command-line surface: example configs parse and
//! run, the CSV schema is stable, and exit codes follow the contract.

use std::path::{Path, PathBuf};
use std::process::Command;

use discenv_cli::gridrun::{eval_scenario_grid, RunMode};
use discenv_cli::scenario::Scenario;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_discenv"))
}

#[test]
fn example_configs_parse_and_describe_valid_scenarios() {
    let dir = configs_dir();
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|s| s.to_str()) != Some("json") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let s = Scenario::from_json(&text)
            .unwrap_or_else(|e| panic!("{} failed to build: {e}", path.display()));
        assert!(!s.grid_points.is_empty(), "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 6, "expected the example configs, found {seen}");
}

#[test]
fn rho_mode_over_annulus_config() {
    let text = std::fs::read_to_string(configs_dir().join("annulus.json")).unwrap();
    let s = Scenario::from_json(&text).unwrap();
    let table = eval_scenario_grid(&s, RunMode::RhoOnly);
    assert_eq!(table.rows.len(), 9);
    for row in &table.rows {
        assert_eq!(row.status, "ok");
        let r = row.point[0].0.hypot(row.point[0].1);
        let rho = row.rho.unwrap();
        assert!(
            (rho - r / 2.0).abs() < 2e-3 * r.max(1.0),
            "rho {rho} vs |z|/2 {}",
            r / 2.0
        );
        assert!(row.vh_upper.is_none());
    }
}

#[test]
fn binary_grid_run_writes_csv_and_sidecar() {
    let dir = std::env::temp_dir().join("discenv-cli-test");
    let _ = std::fs::create_dir_all(&dir);
    let out = dir.join("ball.csv");
    let status = bin()
        .args([
            "grid",
            "--config",
            configs_dir().join("punctured-ball.json").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "3",
        ])
        .status()
        .expect("binary runs");
    assert!(status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "re1,im1,re2,im2,rho,vh_upper,vh_lower,gap,degree,penalty_residual,status"
    );
    assert_eq!(lines.count(), 4);
    let sidecar = dir.join("ball.csv.discs.txt");
    let discs = std::fs::read_to_string(&sidecar).unwrap();
    assert_eq!(discs.lines().count(), 4);
    assert!(discs.starts_with("point 0 affine 2"));
}

#[test]
fn binary_verify_exit_codes() {
    let ok = bin()
        .args(["verify", "--selection", "jensen-riesz"])
        .output()
        .expect("binary runs");
    assert_eq!(ok.status.code(), Some(0), "{:?}", ok);
    let stdout = String::from_utf8_lossy(&ok.stdout);
    assert!(stdout.contains("PASS jensen-riesz"), "{stdout}");

    let unknown = bin()
        .args(["verify", "--selection", "not-a-check"])
        .output()
        .expect("binary runs");
    assert_eq!(unknown.status.code(), Some(2));

    let truncated = bin()
        .args([
            "verify",
            "--selection",
            "sector-projective",
            "--budget-secs",
            "0.0",
        ])
        .output()
        .expect("binary runs");
    assert_eq!(truncated.status.code(), Some(3), "{:?}", truncated);
}

#[test]
fn worker_count_does_not_change_output_bytes() {
    let dir = std::env::temp_dir().join("discenv-cli-workers");
    let _ = std::fs::create_dir_all(&dir);
    let config = configs_dir().join("punctured-ball.json");
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let out = dir.join(format!("ball-w{workers}.csv"));
        let status = bin()
            .args([
                "grid",
                "--config",
                config.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "--seed",
                "11",
                "--workers",
                workers,
            ])
            .status()
            .expect("binary runs");
        assert!(status.success());
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "rows must not depend on the pool size");
}

#[test]
fn binary_oracle_compare() {
    let out = bin()
        .args([
            "oracle-compare",
            "--case",
            "punctured-ball",
            "--points",
            "0.3,0.0,0.4,0.0",
        ])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("classical closed form"), "{stdout}");
    assert!(stdout.contains("reference"), "{stdout}");
}

//! End-to-end checks of the batch front end: determinism of emitted files,
//! exit codes, and the shape of the JSON reports.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracreg"))
}

fn base_config() -> String {
    r#"
[domain]
kind = "interval"
params = [0.0, 1.0]
dim = 1

[problem]
p = 3.0
s = 0.5
f = 1.0

[grid]
h = 0.015625

[output]
dir = "unused"
"#
    .to_string()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap_or_else(|e| panic!("missing {name}: {e}"))
}

#[test]
fn torsion_outputs_are_bit_identical_across_reruns() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("run.toml");
    fs::write(&cfg_path, base_config()).unwrap();
    for out in ["a", "b"] {
        let status = bin()
            .args(["torsion", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(tmp.path().join(out))
            .status()
            .unwrap();
        assert!(status.success());
    }
    for name in ["torsion.csv", "torsion_residual_history.csv", "torsion_summary.json"] {
        assert_eq!(
            read(&tmp.path().join("a"), name),
            read(&tmp.path().join("b"), name),
            "{name} differs between identical runs"
        );
    }
}

#[test]
fn zero_load_solve_reports_zero_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("run.toml");
    fs::write(&cfg_path, base_config().replace("f = 1.0", "f = 0.0")).unwrap();
    let out = tmp.path().join("out");
    let status = bin()
        .args(["solve", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_slice(&read(&out, "solution_summary.json")).unwrap();
    assert_eq!(summary["sup_abs_u"], serde_json::json!(0.0));
}

#[test]
fn missing_config_is_a_config_error() {
    let status = bin().args(["solve"]).status().unwrap();
    assert_eq!(status.code(), Some(3));
    let status = bin().args(["solve", "--config", "/nonexistent.toml"]).status().unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn iteration_cap_is_a_nonconvergence_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("run.toml");
    fs::write(
        &cfg_path,
        base_config() + "\n[solver]\nmax_iter = 1\ntol = 1e-12\n",
    )
    .unwrap();
    let status = bin()
        .args(["torsion", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn invalid_config_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("run.toml");
    fs::write(&cfg_path, base_config().replace("p = 3.0", "p = 1.5")).unwrap();
    let status = bin()
        .args(["solve", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn verify_subset_passes_and_emits_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("run.toml");
    fs::write(
        &cfg_path,
        base_config() + "\n[verify]\ncriteria = [11]\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    let status = bin()
        .args(["verify", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&read(&out, "verify.json")).unwrap();
    assert_eq!(report["all_pass"], serde_json::json!(true));
    assert!(report["criteria"].as_array().unwrap().iter().all(|c| {
        c.get("id").is_some() && c.get("pass").is_some() && c.get("details").is_some()
    }));
    assert!(report.get("config_sha256").is_some());
    assert!(report.get("version").is_some());
}

#[test]
fn verify_tampered_tolerance_fails_with_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("run.toml");
    fs::write(
        &cfg_path,
        base_config() + "\n[verify]\ncriteria = [2]\ntolerance_scale = 1e-3\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    let status = bin()
        .args(["verify", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&read(&out, "verify.json")).unwrap();
    assert_eq!(report["all_pass"], serde_json::json!(false));
}

#[test]
fn barrier_sweep_has_symmetric_rows_and_finite_lambda_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("run.toml");
    let cfg = r#"
[domain]
kind = "ball"
params = [0.0, 0.0, 2.0]
dim = 2

[problem]
p = 2.0
s = 0.5

[grid]
h = 0.03125

[barrier]
r = 0.2
lambda_max = 0.25
lambda_steps = 2
base_cells = 64
"#;
    fs::write(&cfg_path, cfg).unwrap();
    let out = tmp.path().join("out");
    let status = bin()
        .args(["barrier", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = String::from_utf8(read(&out, "barrier_sweep.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    // sign symmetry of the sweep grid
    let lambdas: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    assert!(lambdas.contains(&0.25) && lambdas.contains(&-0.25));
    // lambda = 0 row is finite
    let zero_row = rows.iter().find(|r| r[0] == 0.0).unwrap();
    assert!(zero_row[1].is_finite() && zero_row[1] > 0.0);
}

#[test]
fn obstacle_command_respects_lower_obstacle() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("run.toml");
    let cfg = base_config()
        + r#"
[obstacle]
lower = { kind = "torsion_frac", value = 0.5 }
upper = { kind = "const", value = 1e6 }
"#;
    fs::write(&cfg_path, cfg).unwrap();
    let out = tmp.path().join("out");
    let status = bin()
        .args(["obstacle", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_slice(&read(&out, "obstacle_summary.json")).unwrap();
    assert!(summary["sup_abs_u"].as_f64().unwrap() > 0.0);
}

//! End-to-end checks of the command-line interface: exit codes, file
//! outputs and the profile round trip.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_drypatch"))
}

fn tmpdir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("drypatch_cli_{name}"));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn bifpoints_writes_record_with_exact_constants() {
    let dir = tmpdir("bifpoints");
    let status = bin()
        .args(["--out", dir.to_str().unwrap(), "--rho", "1.5", "bifpoints"])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.join("bifpoints.json")).unwrap();
    let records: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rec = &records[0];
    assert_eq!(rec["p_c"].as_f64().unwrap(), 0.15625);
    assert!((rec["b"].as_f64().unwrap() - 3.072).abs() < 1e-12);
    assert!(rec["spot_b_rings_available"].as_bool().unwrap());
    assert!(std::fs::metadata(dir.join("bifpoints.txt")).is_ok());
}

#[test]
fn invalid_parameters_exit_with_code_2() {
    let dir = tmpdir("invalid");
    let cfg = dir.join("bad.toml");
    std::fs::write(
        &cfg,
        r#"
[params]
gamma = 0.32
sigma = 1.6
nu_mort = 0.2
beta = 3.0
delta = 30.0
rho = 1.5
p = 0.2
"#,
    )
    .unwrap();
    let output = bin()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
            "bifpoints",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("invalid"), "stderr: {stderr}");
}

#[test]
fn amplitude_without_ground_state_fails_nonzero() {
    let dir = tmpdir("amplitude");
    let output = bin()
        .args([
            "--out",
            dir.to_str().unwrap(),
            "amplitude",
            "--c0",
            "1.0",
            "--c3",
            "1.0",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("ground state"), "stderr: {stderr}");
}

#[test]
fn scenario_with_empty_families_succeeds_with_empty_manifest() {
    let dir = tmpdir("empty_families");
    let cfg = dir.join("empty.toml");
    std::fs::write(
        &cfg,
        r#"
rho_cases = [1.5]
families = []
"#,
    )
    .unwrap();
    let output = bin()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
            "scenario",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["total_branches"].as_u64(), Some(0));
}

#[test]
fn solve_then_stability_roundtrip() {
    let dir = tmpdir("roundtrip");
    let cfg = dir.join("small.toml");
    std::fs::write(
        &cfg,
        r#"
rho_cases = [1.5]
families = ["spot_a"]
[grid]
r_star = 200.0
t = 500
"#,
    )
    .unwrap();
    let output = bin()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
            "solve",
        ])
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "solve failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let profile = dir.join("profile_rho_1_50_spot_a.csv");
    assert!(profile.exists());

    // re-reading the profile reproduces the stored residual norm
    let (stored, r, _) = drypatch::report::read_profile_csv(&profile).unwrap();
    let grid = drypatch::grid::build_grid(*r.last().unwrap(), r.len()).unwrap();
    let lap = drypatch::grid::radial_laplacian(&grid);
    let sys = drypatch::solver::SystemDef::FullVonHardenberg(
        drypatch::model::ModelParams::default().with_rho(1.5),
    );
    let res =
        drypatch::solver::residual(&sys, &stored.state(), stored.param, &lap).unwrap();
    let rnorm = drypatch::solver::norm2(&res);
    assert!(
        (rnorm - stored.residual_norm).abs() < 1e-12,
        "stored {:.3e}, recomputed {:.3e}",
        stored.residual_norm,
        rnorm
    );

    let output = bin()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
            "stability",
            "--profile",
            profile.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "stability failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let report = std::fs::read_to_string(dir.join("stability_report.json")).unwrap();
    assert!(report.contains("classification"));
    let _ = Path::new("unused");
}

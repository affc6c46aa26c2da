//! End-to-end checks of the command-line contract.

use std::process::Command;

fn csq() -> Command {
    Command::new(env!("CARGO_BIN_EXE_csq"))
}

#[test]
fn verify_sphere_passes_with_exit_zero() {
    let out = csq().args(["verify", "--model", "sphere", "--n", "3"]).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["pass"], true);
    assert_eq!(json["config"]["model"], "sphere");
    assert_eq!(json["config"]["n"], 3);
    // full effective config is echoed
    for key in ["seed", "samples", "tol", "levels", "command"] {
        assert!(!json["config"][key].is_null(), "missing config echo for {key}");
    }
}

#[test]
fn parameter_errors_exit_two() {
    let out = csq().args(["verify", "--model", "halfplane", "--k", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = csq().args(["verify", "--model", "nosuch"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = csq().args(["slice", "--loop", "pentagon:1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // unknown flags are usage errors too (clap)
    let out = csq().args(["verify", "--frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identical_config_gives_identical_bytes() {
    let run = || {
        csq()
            .args(["verify", "--model", "plane", "--hbar", "1.0", "--seed", "7", "--samples", "6"])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = std::env::temp_dir().join(format!("csq-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "model = \"sphere\"\nn = 2\nseed = 5\n").unwrap();
    let out = csq().args(["verify", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["config"]["n"], 2);
    assert_eq!(json["config"]["seed"], 5);
    // explicit flag overrides the file
    let out = csq()
        .args(["verify", "--config", cfg.to_str().unwrap(), "--n", "4"])
        .output()
        .unwrap();
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["config"]["n"], 4);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = std::env::temp_dir().join(format!("csq-badcfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad.toml");
    std::fs::write(&cfg, "model = \"sphere\"\nfrobnicate = 3\n").unwrap();
    let out = csq().args(["verify", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn chern_reports_the_level_integer_and_writes_outputs() {
    let dir = std::env::temp_dir().join(format!("csq-chern-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let stem = dir.join("report");
    let out = csq()
        .args(["chern", "--model", "sphere", "--n", "5", "--mesh", "3", "--out", stem.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["pass"], true);
    let csv = std::fs::read_to_string(dir.join("report_convergence.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "mesh_level,chern,residual,max_face_phase");
    // every level reports chern = 5
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[1].parse::<f64>().unwrap(), 5.0);
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn star_pauli_check_passes() {
    let out = csq().args(["star", "--n", "1", "--check", "pauli"]).output().unwrap();
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["suites"][0]["name"], "pauli");
    assert_eq!(json["suites"][0]["status"], "pass");
}

#[test]
fn slice_has_monotone_phase_errors() {
    let out = csq()
        .args(["slice", "--model", "sphere", "--n", "2", "--loop", "latitude:0.7", "--levels", "16,32,64,128"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let csv = json["suites"][0]["tables"]["convergence_csv"].as_str().unwrap();
    let errs: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn podles_reports_coefficients_and_truncation_bound() {
    let out = csq().args(["podles", "--hbar", "0.6", "--samples", "5"]).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["pass"], true);
    let coeff_suite = &json["suites"][0];
    assert_eq!(coeff_suite["name"], "coefficients");
    assert!(coeff_suite["residuals"]["truncation_bound"].as_f64().unwrap() >= 0.0);
    let csv = coeff_suite["tables"]["coefficients_csv"].as_str().unwrap();
    assert!(csv.starts_with("n,c_n\n"));
    assert!(csv.lines().count() > 5);
}

#[test]
fn quantize_suites_pass() {
    let out = csq().args(["quantize", "--n", "2", "--levels", "4,8"]).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = json["suites"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["gram", "resolution", "roundtrip", "su2-schur", "berezin"]);
    assert_eq!(json["pass"], true);
}

#[test]
fn threads_env_fallback_is_accepted() {
    let out = csq()
        .env("CSQ_LAB_THREADS", "2")
        .args(["verify", "--model", "sphere", "--n", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["config"]["threads"], 2);
}

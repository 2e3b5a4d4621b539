use std::path::Path;
use std::process::{Command, Output};

use bgw_qsd::io::read_measure_csv;
use bgw_qsd::verify::{eigen_residual, functional_equation_residual, grid_up_to};
use bgw_qsd::OffspringDistribution;

const GEOMETRIC: &str = r#"{"type":"geometric","b":0.25}"#;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bgw-qsd")).args(args).output().expect("binary runs")
}

fn error_kind(out: &Output) -> String {
    let line = String::from_utf8_lossy(&out.stderr);
    let v: serde_json::Value = serde_json::from_str(line.trim()).expect("single json error line");
    v["error"].as_str().unwrap().to_string()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn yaglom_pure_death_is_delta_one() {
    let out = bin(&["yaglom", "--offspring", r#"{"type":"pure_death","m":0.5}"#, "--order", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let table = bgw_qsd::io::read_table(out.stdout.as_slice()).unwrap();
    assert_eq!(table.rows[0], vec![1.0, 1.0]);
    assert!(table.rows[1..].iter().all(|r| r[1] == 0.0));
}

#[test]
fn construct_pipeline_passes() {
    let out = bin(&["construct", "--alpha", "0.5", "--measure", r#"{"type":"log_uniform","c":1}"#, "--normalize", "--verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let nu = read_measure_csv(out.stdout.as_slice()).unwrap();
    assert!((nu.get(1) - 0.5).abs() < 1e-10);
}

#[test]
fn input_errors_exit_one() {
    let out = bin(&["construct", "--alpha", "1.5", "--measure", r#"{"type":"log_uniform","c":1}"#]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "OutOfRangeAlpha");

    let out = bin(&["yaglom", "--offspring", r#"{"type":"pure_death","m":0.5,"extra":1}"#]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "InvalidSpec");

    let out = bin(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "InvalidArguments");

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"alpha": 0.5, "ordr": 12}"#).unwrap();
    let out = bin(&["hoppe", "--config", path_str(&cfg)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "InvalidSpec");
}

#[test]
fn config_file_supplies_settings() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, format!(r#"{{"alpha": 0.5, "order": 64, "offspring": {GEOMETRIC}}}"#)).unwrap();
    let out = bin(&["hoppe", "--config", path_str(&cfg)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verification_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("nu.csv");
    let out = bin(&["construct", "--offspring", GEOMETRIC, "--alpha", "0.5", "--kind", "qsd-power", "--order", "1024", "--out", path_str(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let ok = bin(&["verify", "--offspring", GEOMETRIC, "--input", path_str(&csv), "--k-report", "128", "--z-max", "0.9"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let bad = bin(&["verify", "--offspring", GEOMETRIC, "--input", path_str(&csv), "--lambda", "0.7", "--z-max", "0.9"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn csv_roundtrip_preserves_residuals() {
    let dist = OffspringDistribution::geometric(0.25).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("nu.csv");
    let out = bin(&[
        "construct", "--offspring", GEOMETRIC, "--alpha", "0.3", "--measure", r#"{"type":"log_uniform","c":1}"#,
        "--normalize", "--order", "256", "--out", path_str(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let nu = read_measure_csv(std::fs::read(&csv).unwrap().as_slice()).unwrap();
    let again = dir.path().join("again.csv");
    let mut f = std::fs::File::create(&again).unwrap();
    bgw_qsd::io::write_measure_csv(&mut f, &nu).unwrap();
    drop(f);
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), std::fs::read_to_string(&again).unwrap());
    let built = bgw_qsd::construct::invariant_measure(
        &dist,
        0.3,
        &bgw_qsd::selfsimilar::normalize_for_qsd(&bgw_qsd::SelfSimilarMeasure::log_uniform(dist.mean(), 1.0).unwrap(), 0.3).unwrap(),
        256,
        1e-12,
    )
    .unwrap();
    let grid = grid_up_to(0.05, 0.9);
    let a = functional_equation_residual(&built, &dist, built.lambda, &grid).unwrap();
    let b = functional_equation_residual(&nu, &dist, nu.lambda, &grid).unwrap();
    assert!((a.residual - b.residual).abs() <= 1e-12);
    let a = eigen_residual(&built, &dist, built.lambda, 256, 64).unwrap();
    let b = eigen_residual(&nu, &dist, nu.lambda, 256, 64).unwrap();
    assert!((a.residual - b.residual).abs() <= 1e-12);
}

#[test]
fn remaining_subcommands_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("nu.csv");
    let report = dir.path().join("report.json");
    let pure = r#"{"type":"pure_death","m":0.5}"#;
    assert_eq!(bin(&["construct", "--offspring", pure, "--alpha", "0.5", "--kind", "qsd-power", "--order", "4096", "--out", path_str(&csv)]).status.code(), Some(0));
    let c = 0.5 / std::f64::consts::PI.sqrt();
    let target = format!(r#"{{"type":"log_uniform","c":{c}}}"#);
    let out = bin(&["recover", "--offspring", pure, "--input", path_str(&csv), "--n", "10", "--bins", "8", "--measure", &target, "--report", path_str(&report)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let reports: Vec<serde_json::Value> = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(reports[0]["check_name"], "lambda_recovery");

    let out = bin(&["joffe", "--offspring", pure, "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let t = bgw_qsd::io::read_table(out.stdout.as_slice()).unwrap();
    assert_eq!(t.rows[4], vec![5.0, 5.0]);

    assert_eq!(bin(&["hoppe", "--offspring", GEOMETRIC, "--alpha", "0.5", "--order", "128"]).status.code(), Some(0));
    assert_eq!(bin(&["gamma-check", "--a", "0.5", "--alpha", "-0.5,0.3"]).status.code(), Some(0));
    for mode in ["qsd", "one-step", "yaglom"] {
        let out = bin(&["mc", "--mode", mode, "--alpha", "0.5", "--samples", "20000", "--seed", "3", "--order", "256", "--tv-tol", "0.05"]);
        assert_eq!(out.status.code(), Some(0), "{mode}: {}", String::from_utf8_lossy(&out.stderr));
        let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(r["seed"], 3);
    }
}

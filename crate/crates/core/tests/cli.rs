use std::path::Path;
use std::process::{Command, Output};
use tfdiff::harness::VerificationReport;

fn tfdiff(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfdiff"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("TFDIFF_OUT_DIR")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn missing_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = tfdiff(&["verify", "--config", "/nonexistent/config.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for text in ["{ not json", r#"{"time": {"tau": "-1"}}"#, r#"{"suites": ["bogus"]}"#] {
        let cfg = write_config(dir.path(), text);
        let out = tfdiff(&["solve", "--config", &cfg], dir.path());
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(!out.stderr.is_empty());
    }
    let out = tfdiff(&["verify", "--suite", "bogus"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_writes_diagnostics_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"equation": {"alpha": 0.5, "m": 1}, "domain": {"lower": 0, "upper": 3.141592653589793, "cells": 40},
            "time": {"tau": "0.01", "T": 0.5}, "data": {"profile": "sine"}}"#,
    );
    let out = tfdiff(&["solve", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("solve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,mass,l1,l2,linf,u_mass_G"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 51);
    assert_eq!(rows[0][0], 0.0);
    assert!((rows[0][1] - 2.0).abs() < 1e-2);
    assert!(rows.windows(2).all(|w| w[1][4] <= w[0][4]));
}

#[test]
fn runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let cfg = write_config(
            dir,
            r#"{"equation": {"alpha": 0.4, "m": 0.5}, "domain": {"radius": 3, "h": "0.1"},
                "time": {"tau": "0.02", "T": 0.4}, "data": {"profile": "random"}, "seed": 11}"#,
        );
        assert_eq!(tfdiff(&["solve", "--config", &cfg], dir).status.code(), Some(0));
        assert_eq!(tfdiff(&["verify", "--suite", "mass"], dir).status.code(), Some(0));
    }
    for name in ["solve.csv", "report.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
}

#[test]
fn kernels_and_ode_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = tfdiff(&["kernels", "--alpha", "0.5", "--tau", "0.01", "--T", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("kernels.csv")).unwrap();
    assert!(csv.starts_with("t,k,ell,ell_numeric,residual,residual_numeric\n"));
    assert_eq!(csv.lines().count(), 101);
    let last: Vec<f64> = csv
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!(last[5].abs() < 1e-10);

    let out = tfdiff(
        &["ode", "--alpha", "0.5", "--m", "0.5", "--tau", "0.1", "--T", "10"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("ode.csv")).unwrap();
    assert!(csv.starts_with("t,v\n"));
    assert_eq!(csv.lines().count(), 102);
}

#[test]
fn out_dir_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_tfdiff"))
        .args(["kernels", "--tau", "0.1"])
        .env("TFDIFF_OUT_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("kernels.csv").exists());
}

// The nodal pair residual of the closed-form complement does not shrink
// with tau, so this run reports exactly those checks as failed and
// exits 1.
#[test]
fn verify_kernels_exit_code_follows_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = tfdiff(&["verify", "--suite", "kernels", "--alpha", "0.5"], dir.path());
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let report: VerificationReport = serde_json::from_str(&text).unwrap();
    assert_eq!(out.status.code(), Some(if report.all_pass() { 0 } else { 1 }));
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    assert_eq!(
        failed,
        [
            "sonine_residual_max[alpha=0.5]",
            "sonine_residual_decreasing[alpha=0.5]",
            "numeric_complement_vs_closed_form[alpha=0.5]"
        ]
    );
    assert!(report
        .checks
        .iter()
        .all(|c| !c.anchor.is_empty() && !c.tolerance.is_nan()));
}

#[test]
fn zero_data_marks_suites_vacuous() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"data": {"profile": "zero"}, "suites": ["mass", "nonextinction"]}"#,
    );
    let out = tfdiff(&["verify", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report: VerificationReport =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report.vacuous, ["mass", "nonextinction"]);
    assert_eq!(report.find("zero_data_drift").unwrap().measured, 0.0);
}

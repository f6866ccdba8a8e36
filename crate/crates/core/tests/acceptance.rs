//! One test per acceptance criterion. Each prints a `PASS` or `FAIL` line
//! with the measured values before asserting.

use statrs::function::erf::erfc;
use std::io::Write;
use std::sync::OnceLock;
use tfdiff::harness::suites::{
    kernels, suite_benchmark, suite_contraction, suite_mass, suite_nonextinction, BenchmarkParams, ContractionParams,
    KernelParams, MassParams, NonextinctionParams,
};
use tfdiff::harness::{Check, VerificationReport};
use tfdiff::{max_sonine_residual, rl_weights, sonine_complement, volterra_relaxation, TimeGrid};

fn verdict(n: usize, title: &str, checks: &[Check]) {
    let ok = !checks.is_empty() && checks.iter().all(|c| c.pass);
    let detail: Vec<String> = checks
        .iter()
        .map(|c| {
            format!(
                "{} = {:.6e} (tol {:.3e}{})",
                c.name,
                c.measured,
                c.tolerance,
                if c.pass { "" } else { ", miss" }
            )
        })
        .collect();
    // written to the raw handle so libtest shows the line for passing tests too
    let line = format!(
        "\n{} criterion {n} ({title}): {}\n",
        if ok { "PASS" } else { "FAIL" },
        detail.join("; ")
    );
    std::io::stdout().lock().write_all(line.as_bytes()).unwrap();
    assert!(ok, "criterion {n} failed");
}

fn pick(r: &VerificationReport, pred: impl Fn(&Check) -> bool) -> Vec<Check> {
    r.checks
        .iter()
        .filter(|c| !c.illustrative && pred(c))
        .cloned()
        .collect()
}

fn named(r: &VerificationReport, names: &[&str]) -> Vec<Check> {
    names
        .iter()
        .map(|n| r.find(n).unwrap_or_else(|| panic!("check {n} missing")).clone())
        .collect()
}

fn contraction() -> &'static VerificationReport {
    static REPORT: OnceLock<VerificationReport> = OnceLock::new();
    REPORT.get_or_init(|| suite_contraction(&ContractionParams::default()).unwrap())
}

fn benchmark() -> &'static VerificationReport {
    static REPORT: OnceLock<VerificationReport> = OnceLock::new();
    REPORT.get_or_init(|| suite_benchmark(&BenchmarkParams::default()).unwrap())
}

#[test]
fn criterion_01_sonine_residual() {
    let mut checks = Vec::new();
    for alpha in [0.25, 0.5, 0.75] {
        let residuals: Vec<f64> = [4e-3, 2e-3, 1e-3]
            .iter()
            .map(|&tau| {
                let g = TimeGrid::with_horizon(tau, 1.0).unwrap();
                max_sonine_residual(&rl_weights(alpha, g).unwrap(), &sonine_complement(alpha, g).unwrap()).unwrap()
            })
            .collect();
        checks.push(Check::at_most(
            "acceptance",
            &format!("max_residual[alpha={alpha}]"),
            "k * l = 1",
            residuals[2],
            5e-3,
        ));
        let ratio = residuals
            .windows(2)
            .map(|w| w[1] / w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        checks.push(Check::at_most(
            "acceptance",
            &format!("halving_ratio[alpha={alpha}]"),
            "residual decreases under tau halving",
            ratio,
            1.0 - 1e-9,
        ));
    }
    verdict(1, "kernel oracle", &checks);
}

#[test]
fn criterion_02_power_rule() {
    let p = KernelParams {
        alphas: vec![0.5],
        ..KernelParams::default()
    };
    let checks: Vec<Check> = kernels::power_rule_checks(&p)
        .unwrap()
        .into_iter()
        .filter(|c| !c.illustrative)
        .collect();
    verdict(2, "fractional power rule", &checks);
}

#[test]
fn criterion_03_linear_benchmark() {
    verdict(
        3,
        "linear benchmark",
        &named(benchmark(), &["sine_error", "sine_error_halving"]),
    );
}

#[test]
fn criterion_04_relaxation_and_yosida() {
    let g = TimeGrid::with_horizon(1e-3, 1.0).unwrap();
    let s = volterra_relaxation(&sonine_complement(0.5, g).unwrap(), 1).unwrap();
    let oracle = std::f64::consts::E * erfc(1.0);
    let mut checks = vec![Check::within(
        "acceptance",
        "relaxation_vs_e_erfc_1",
        "s_1(1) = e erfc(1)",
        s.last(),
        oracle,
        1e-2,
    )];
    let p = KernelParams {
        alphas: vec![0.5],
        ..KernelParams::default()
    };
    let r = kernels::yosida_checks(&p).unwrap();
    checks.extend(
        r.into_iter()
            .filter(|c| c.name.starts_with("yosida_identity") || c.name.starts_with("yosida_l1_decreasing")),
    );
    verdict(4, "relaxation oracle", &checks);
}

#[test]
fn criterion_05_contraction_batch() {
    let p = ContractionParams::default();
    assert!(p.pairs >= 50);
    let r = contraction();
    let checks = pick(r, |c| !c.name.starts_with("weighted_contraction"));
    assert_eq!(checks.len(), 1 + 9 * 7);
    verdict(5, "contraction suite", &checks);
}

#[test]
fn criterion_06_weighted_contraction() {
    let checks = pick(contraction(), |c| c.name.starts_with("weighted_contraction"));
    assert_eq!(checks.len(), 9);
    verdict(6, "weighted contraction with memory term", &checks);
}

#[test]
fn criterion_07_mass_conservation() {
    let r = suite_mass(&MassParams::default()).unwrap();
    verdict(
        7,
        "mass conservation",
        &named(
            &r,
            &[
                "drift_decreasing_fast[m=0.5]",
                "boundary_functional_exponent",
                "drift_decreasing_slow[m=2]",
            ],
        ),
    );
}

#[test]
fn criterion_08_nonextinction() {
    let r = suite_nonextinction(&NonextinctionParams::default()).unwrap();
    verdict(
        8,
        "nonextinction",
        &named(&r, &["weighted_mass_above_comparison", "comparison_envelope_slope"]),
    );
}

#[test]
fn criterion_09_chain_rule() {
    let checks: Vec<Check> = kernels::chain_rule_checks(&KernelParams::default())
        .unwrap()
        .into_iter()
        .filter(|c| !c.illustrative)
        .collect();
    verdict(9, "discrete chain-rule inequality", &checks);
}

#[test]
fn criterion_10_weak_residual() {
    verdict(
        10,
        "weak-form residual",
        &named(benchmark(), &["weak_residual_reduction"]),
    );
}

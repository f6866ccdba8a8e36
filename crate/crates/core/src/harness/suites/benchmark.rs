//! Linear sine benchmark on `(0, pi)`: Mittag-Leffler error and the
//! discrete weak identity under refinement.

use crate::error::Result;
use crate::harness::report::{Check, VerificationReport};
use crate::kernel::{rl_weights, sonine_complement, KernelWeights, TimeGrid};
use crate::memory::{solve, weak_residual, SolveConfig, StateHistory};
use crate::nonlinearity::power_law;
use crate::ode::mittag_leffler;
use crate::spatial::{plateau, Field, SpaceGrid};
use rayon::prelude::*;
use std::f64::consts::PI;

const SUITE: &str = "benchmark";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkParams {
    pub alpha: f64,
    /// Coarse steps; the refined run halves both.
    pub tau: f64,
    pub h: f64,
    pub horizon: f64,
}

impl Default for BenchmarkParams {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            tau: 1e-3,
            h: PI / 200.0,
            horizon: 1.0,
        }
    }
}

/// Errors and residuals of one sine run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineRun {
    pub tau: f64,
    pub h: f64,
    /// `max_x |u(T) - E_alpha(-T^alpha) sin x| / E_alpha(-T^alpha)`.
    pub relative_error: f64,
    /// `max_j |r_j|` of the weak identity with `l = g_{1-alpha}`.
    pub weak_residual: f64,
    /// Same with the numeric complement of the scheme's kernel.
    pub weak_residual_numeric: f64,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Smooth test function supported in `[pi/2 - 1.2, pi/2 + 1.2]`.
pub fn benchmark_test_function(grid: SpaceGrid) -> Field {
    Field::from_fn(grid, |x| plateau((x[0] - 0.5 * PI).abs(), 0.5, 1.2))
}

pub fn sine_history(alpha: f64, tau: f64, h: f64, horizon: f64) -> Result<StateHistory> {
    let tgrid = TimeGrid::with_horizon(tau, horizon)?;
    let grid = SpaceGrid::interval(0.0, PI, h)?;
    let cfg = SolveConfig::new(rl_weights(alpha, tgrid)?, power_law(1.0)?, grid)?;
    solve(&cfg, &Field::from_fn(grid, |x| x[0].sin()))
}

pub fn sine_run(alpha: f64, tau: f64, h: f64, horizon: f64) -> Result<SineRun> {
    let history = sine_history(alpha, tau, h, horizon)?;
    let cfg = history.config();
    let grid = *cfg.grid();
    let t = cfg.tgrid().horizon();
    let e = mittag_leffler(alpha, -t.powf(alpha))?;
    let err = (0..grid.len())
        .map(|i| (history.last().values()[i] - e * grid.coords(i)[0].sin()).abs())
        .fold(0.0, f64::max);
    let test = benchmark_test_function(grid);
    let ell: KernelWeights = sonine_complement(alpha, *cfg.tgrid())?;
    Ok(SineRun {
        tau,
        h,
        relative_error: err / e,
        weak_residual: max_abs(weak_residual(&history, &test, &ell)?.values()),
        weak_residual_numeric: max_abs(weak_residual(&history, &test, cfg.complement())?.values()),
    })
}

pub fn suite_benchmark(p: &BenchmarkParams) -> Result<VerificationReport> {
    let mut r = VerificationReport::new();
    let runs: Vec<Result<SineRun>> = [(p.tau, p.h), (0.5 * p.tau, 0.5 * p.h)]
        .par_iter()
        .map(|&(tau, h)| sine_run(p.alpha, tau, h, p.horizon))
        .collect();
    let (coarse, fine) = match (runs[0].clone(), runs[1].clone()) {
        (Ok(c), Ok(f)) => (c, f),
        (c, f) => {
            let msg = c.err().or(f.err()).map(|e| e.to_string()).unwrap_or_default();
            r.push(Check::holds(SUITE, "solver_failure", &msg, false));
            return Ok(r);
        }
    };
    r.push(Check::at_most(
        SUITE,
        "sine_error",
        "u(T) = E_alpha(-T^alpha) sin x, relative max-norm error",
        coarse.relative_error,
        0.02,
    ));
    r.push(Check::within(
        SUITE,
        "sine_error_halving",
        "error ratio under tau and h halving",
        coarse.relative_error / fine.relative_error,
        2.0,
        0.6,
    ));
    r.push(Check::at_least(
        SUITE,
        "weak_residual_reduction",
        "max_j |r_j| with l = g_{1-alpha} falls under tau and h halving",
        coarse.weak_residual / fine.weak_residual,
        1.5,
    ));
    r.push(
        Check::at_most(
            SUITE,
            "weak_residual_coarse",
            "max_j |r_j| with l = g_{1-alpha}",
            coarse.weak_residual,
            f64::INFINITY,
        )
        .illustrative(),
    );
    r.push(Check::at_most(
        SUITE,
        "weak_residual_numeric_complement",
        "max_j |r_j| with the discrete complement of the scheme",
        coarse.weak_residual_numeric.max(fine.weak_residual_numeric),
        1e-9,
    ));
    r.note(format!(
        "sine runs at (tau, h) = ({}, {}) and ({}, {}), alpha = {}, T = {}",
        coarse.tau, coarse.h, fine.tau, fine.h, p.alpha, p.horizon
    ));
    Ok(r)
}

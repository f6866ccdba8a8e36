//! Lower bound for the Gaussian-weighted mass of fast diffusion and the
//! decay envelope of the comparison ODE.

use crate::error::Result;
use crate::harness::report::{Check, VerificationReport};
use crate::kernel::{rl_weights, KernelKind, KernelWeights, SampledFunction, TimeGrid};
use crate::memory::{solve, SolveConfig, StateHistory};
use crate::nonlinearity::{power_law, regularize};
use crate::ode::{envelope_check_window, nonextinction_comparator, solve_power_ode, OdeProblem, COMPARISON_SLACK};
use crate::spatial::{gaussian, lq_norm, Field, SpaceGrid};

const SUITE: &str = "nonextinction";

#[derive(Debug, Clone, PartialEq)]
pub struct NonextinctionParams {
    pub alpha: f64,
    pub m: f64,
    pub dim: usize,
    pub radius: f64,
    pub h: f64,
    pub tau: f64,
    pub horizon: f64,
    pub regularization: u32,
    /// Height of the bump `a (1 - |x|^2/w^2)_+^2`; zero makes the suite vacuous.
    pub amplitude: f64,
    pub width: f64,
    /// Step and horizon of the ODE-only envelope run.
    pub ode_tau: f64,
    pub ode_horizon: f64,
    pub window: (f64, f64),
    /// Radius of the classical-scheme contrast box.
    pub contrast_radius: f64,
}

impl Default for NonextinctionParams {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            m: 0.5,
            dim: 1,
            radius: 10.0,
            h: 0.1,
            tau: 1e-2,
            horizon: 5.0,
            regularization: 1000,
            amplitude: 1.0,
            width: 1.0,
            ode_tau: 1.0,
            ode_horizon: 1e4,
            window: (1e2, 1e4),
            contrast_radius: 2.0,
        }
    }
}

fn bump(grid: SpaceGrid, a: f64, w: f64) -> Field {
    Field::from_fn(grid, |x| {
        a * (1.0 - (x[0] * x[0] + x[1] * x[1]) / (w * w)).max(0.0).powi(2)
    })
}

fn run(kernel: KernelWeights, m: f64, regularization: u32, u0: &Field) -> Result<StateHistory> {
    let phi = regularize(&power_law(m)?, u0.max_abs() + 1.0, regularization)?;
    solve(&SolveConfig::new(kernel, phi, *u0.grid())?, u0)
}

// sup-norm at T relative to the start
fn sup_ratio(h: &StateHistory) -> f64 {
    h.last().max_abs() / h.states()[0].max_abs()
}

pub fn suite_nonextinction(p: &NonextinctionParams) -> Result<VerificationReport> {
    let mut r = VerificationReport::new();
    let grid = SpaceGrid::centered(p.radius, p.h, p.dim)?;
    let tgrid = TimeGrid::with_horizon(p.tau, p.horizon)?;
    let u0 = bump(grid, p.amplitude, p.width);
    if u0.max_abs() == 0.0 {
        r.mark_vacuous(SUITE);
        r.note("zero data: every lower bound is trivial, suite skipped");
        return Ok(r);
    }
    let history = match run(rl_weights(p.alpha, tgrid)?, p.m, p.regularization, &u0) {
        Ok(h) => h,
        Err(e) => {
            r.push(Check::holds(SUITE, "solver_failure", &e.to_string(), false));
            return Ok(r);
        }
    };
    let g = gaussian(&grid);
    let vol = grid.cell_volume();
    let g_mass: f64 = g.values().iter().sum::<f64>() * vol;
    let g_max = g.values().iter().copied().fold(0.0, f64::max);
    let weighted = |u: &Field| u.values().iter().zip(g.values()).map(|(a, b)| a * b).sum::<f64>() * vol;
    let big_u0 = weighted(&u0);
    let big_u: Vec<f64> = history.states()[1..].iter().map(weighted).collect();
    let series = SampledFunction::new(tgrid, big_u.clone(), Some(big_u0))?;

    let cmp = nonextinction_comparator(&series, big_u0, p.alpha, p.m, p.dim, g_mass)?;
    r.push(Check::at_least(
        SUITE,
        "weighted_mass_above_comparison",
        "U_j >= Z_j with C = 2N (int G)^{1-m}",
        cmp.min_ratio,
        1.0 - COMPARISON_SLACK,
    ));

    let mut hoelder = f64::INFINITY;
    for (u, &uj) in history.states()[1..].iter().zip(&big_u) {
        if uj > 0.0 {
            hoelder = hoelder.min(lq_norm(u, 1.0)? * g_max / uj);
        }
    }
    r.push(Check::at_least(
        SUITE,
        "l1_above_weighted_mass",
        "||u_j||_1 >= U_j / max G",
        hoelder,
        1.0 - 1e-12,
    ));

    // envelope of Z on a long horizon, ODE only
    let ode = OdeProblem {
        alpha: p.alpha,
        lambda: cmp.constant,
        m: p.m,
        v0: big_u0,
        tgrid: TimeGrid::with_horizon(p.ode_tau, p.ode_horizon)?,
    };
    let z = solve_power_ode(&ode)?;
    let env = envelope_check_window(&z, p.alpha, p.m, p.window)?;
    r.push(Check::within(
        SUITE,
        "comparison_envelope_slope",
        "Z(t) ~ t^{-alpha/m} for large t",
        env.tail_slope,
        env.expected_slope,
        0.1 * env.expected_slope.abs(),
    ));
    r.push(Check::at_least(
        SUITE,
        "comparison_envelope_lower",
        "c1 = min Z (1 + t^{alpha/m}) > 0",
        env.c1,
        f64::MIN_POSITIVE,
    ));
    r.push(
        Check::at_least(
            SUITE,
            "comparison_envelope_upper",
            "c2 = max Z (1 + t^{alpha/m})",
            env.c2,
            env.c1,
        )
        .illustrative(),
    );

    // classical contrast: backward Euler has k = delta, weights (1, 0, ..., 0)
    let small = SpaceGrid::centered(p.contrast_radius, p.h, p.dim)?;
    let v0 = bump(small, p.amplitude, p.width.min(0.5 * p.contrast_radius));
    let mut delta = vec![0.0; tgrid.steps()];
    delta[0] = 1.0;
    let classical = run(
        KernelWeights::new(tgrid, delta, KernelKind::Numeric)?,
        p.m,
        p.regularization,
        &v0,
    );
    let fractional = run(rl_weights(p.alpha, tgrid)?, p.m, p.regularization, &v0);
    match (classical, fractional) {
        (Ok(c), Ok(f)) => {
            r.push(
                Check::at_most(
                    SUITE,
                    "contrast_classical_sup_ratio",
                    "alpha = 1 sup|u(T)| / sup|u0|",
                    sup_ratio(&c),
                    1.0,
                )
                .illustrative(),
            );
            r.push(
                Check::at_most(
                    SUITE,
                    "contrast_fractional_sup_ratio",
                    "alpha < 1 sup|u(T)| / sup|u0|",
                    sup_ratio(&f),
                    1.0,
                )
                .illustrative(),
            );
        }
        (c, f) => {
            let msg = c.err().or(f.err()).map(|e| e.to_string()).unwrap_or_default();
            r.push(Check::holds(SUITE, "contrast_run", &msg, false).illustrative());
        }
    }
    r.note(format!(
        "comparison constant C = {}, U_0 = {big_u0}, envelope c1 = {}, c2 = {}",
        cmp.constant, env.c1, env.c2
    ));
    Ok(r)
}

//! Mass conservation on growing boxes and the R-scaling of the boundary
//! functional.

use crate::error::Result;
use crate::harness::report::{Check, VerificationReport};
use crate::kernel::{rl_weights, TimeGrid};
use crate::memory::{solve, SolveConfig};
use crate::nonlinearity::{power_law, regularize};
use crate::ode::ls_slope;
use crate::spatial::{lq_norm, mass, plateau_laplacian, Field, SpaceGrid};
use rayon::prelude::*;

const SUITE: &str = "mass";

#[derive(Debug, Clone, PartialEq)]
pub struct MassParams {
    pub alpha: f64,
    /// Fast-diffusion exponent, in `[(N-2)/N, 1)`.
    pub m_fast: f64,
    /// Slow-diffusion exponent run with `L^2` data.
    pub m_slow: f64,
    /// Smallest radius; the study uses `R, 2R, 4R`.
    pub radius: f64,
    pub h: f64,
    pub tau: f64,
    pub horizon: f64,
    pub regularization: u32,
    /// Amplitude of the data; zero makes the suite vacuous.
    pub amplitude: f64,
    pub width: f64,
}

impl Default for MassParams {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            m_fast: 0.5,
            m_slow: 2.0,
            radius: 5.0,
            h: 0.1,
            tau: 1e-2,
            horizon: 1.0,
            regularization: 1000,
            amplitude: 1.0,
            width: 1.0,
        }
    }
}

/// One run of the drift study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftRun {
    pub radius: f64,
    pub mass0: f64,
    pub mass_t: f64,
    /// `|mass(T) - mass(0)| / mass(0)`, or the absolute drift when the
    /// initial mass is zero.
    pub drift: f64,
    /// `int |u(T)|^m |Delta phi_R|`.
    pub boundary_term: f64,
    pub l1_t: f64,
}

/// `phi_R(x) = plateau(|x|, R/4, R/2)`, supported well inside `[-R, R]`.
fn test_radii(radius: f64) -> (f64, f64) {
    (0.25 * radius, 0.5 * radius)
}

/// `I(phi_R) = (int |Delta phi_R|^{1/(1-m)})^{1-m}` by the midpoint rule
/// on `[-R, R]` with `cells` cells.
pub fn boundary_functional(radius: f64, m: f64, cells: usize) -> f64 {
    let (inner, outer) = test_radii(radius);
    let p = 1.0 / (1.0 - m);
    let dx = 2.0 * radius / cells as f64;
    let s: f64 = (0..cells)
        .map(|i| {
            let x = -radius + (i as f64 + 0.5) * dx;
            plateau_laplacian(x.abs(), inner, outer, 1).abs().powf(p)
        })
        .sum::<f64>()
        * dx;
    s.powf(1.0 - m)
}

fn drift_run(p: &MassParams, radius: f64, m: f64, data: impl Fn(f64) -> f64) -> Result<DriftRun> {
    let grid = SpaceGrid::centered(radius, p.h, 1)?;
    let tgrid = TimeGrid::with_horizon(p.tau, p.horizon)?;
    let u0 = Field::from_fn(grid, |x| data(x[0]));
    let phi = regularize(&power_law(m)?, u0.max_abs() + 1.0, p.regularization)?;
    let cfg = SolveConfig::new(rl_weights(p.alpha, tgrid)?, phi, grid)?;
    let history = solve(&cfg, &u0)?;
    let last = history.last();
    let (mass0, mass_t) = (mass(&u0), mass(last));
    let drift = if mass0 != 0.0 {
        (mass_t - mass0).abs() / mass0.abs()
    } else {
        (mass_t - mass0).abs()
    };
    let (inner, outer) = test_radii(radius);
    let boundary_term = last
        .values()
        .iter()
        .enumerate()
        .map(|(i, u)| u.abs().powf(m) * plateau_laplacian(grid.coords(i)[0].abs(), inner, outer, 1).abs())
        .sum::<f64>()
        * grid.cell_volume();
    Ok(DriftRun {
        radius,
        mass0,
        mass_t,
        drift,
        boundary_term,
        l1_t: lq_norm(last, 1.0)?,
    })
}

// Largest ratio between consecutive drifts; below 1 means decreasing.
fn worst_ratio(runs: &[DriftRun]) -> f64 {
    runs.windows(2)
        .map(|w| w[1].drift / w[0].drift)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn fit_exponent(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|(r, v)| (r.ln(), v.ln())).collect();
    -ls_slope(&logs)
}

pub fn suite_mass(p: &MassParams) -> Result<VerificationReport> {
    let mut r = VerificationReport::new();
    let radii = [p.radius, 2.0 * p.radius, 4.0 * p.radius];
    let (a, w) = (p.amplitude, p.width);
    let jobs: Vec<(f64, bool)> = radii.iter().flat_map(|&rad| [(rad, true), (rad, false)]).collect();
    let runs: Vec<Result<DriftRun>> = jobs
        .par_iter()
        .map(|&(rad, fast)| {
            if fast {
                drift_run(p, rad, p.m_fast, |x| a * (1.0 - x * x / (w * w)).max(0.0).powi(2))
            } else {
                drift_run(p, rad, p.m_slow, |x| a / (1.0 + x * x / (w * w)))
            }
        })
        .collect();
    let mut fast = Vec::new();
    let mut slow = Vec::new();
    for ((_, is_fast), run) in jobs.iter().zip(runs) {
        match run {
            Ok(d) if *is_fast => fast.push(d),
            Ok(d) => slow.push(d),
            Err(e) => r.push(Check::holds(SUITE, "solver_failure", &e.to_string(), false)),
        }
    }
    if p.amplitude == 0.0 {
        r.mark_vacuous(SUITE);
        let worst = fast.iter().chain(&slow).map(|d| d.drift).fold(0.0, f64::max);
        r.push(Check::at_most(
            SUITE,
            "zero_data_drift",
            "zero data keep zero mass",
            worst,
            0.0,
        ));
        return Ok(r);
    }

    for (label, m, runs) in [("fast", p.m_fast, &fast), ("slow", p.m_slow, &slow)] {
        for d in runs.iter() {
            r.push(
                Check::at_most(
                    SUITE,
                    &format!("drift_{label}[R={}]", d.radius),
                    "relative mass drift |mass(T) - mass(0)| / mass(0)",
                    d.drift,
                    f64::INFINITY,
                )
                .illustrative(),
            );
        }
        if runs.len() == radii.len() {
            r.push(Check::at_most(
                SUITE,
                &format!("drift_decreasing_{label}[m={m}]"),
                "mass drift shrinks as the box grows",
                worst_ratio(runs),
                1.0 - 1e-9,
            ));
        }
    }

    // I(phi_R) decays like R^{-N(m - (N-2)/N)}, which is R^{-(m+1)} for N = 1
    let expected = p.m_fast + 1.0;
    let cells = (8.0 * radii[2] / p.h).ceil() as usize;
    let functional: Vec<(f64, f64)> = radii
        .iter()
        .map(|&rad| (rad, boundary_functional(rad, p.m_fast, cells)))
        .collect();
    r.push(Check::within(
        SUITE,
        "boundary_functional_exponent",
        "I(phi_R) ~ R^{-N(m - (N-2)/N)}",
        fit_exponent(&functional),
        expected,
        0.3,
    ));
    if fast.len() == radii.len() {
        // Hoelder: int |u|^m |Delta phi_R| <= ||u||_1^m I(phi_R), evaluated
        // with the same nodes on both sides
        let mut worst: f64 = 0.0;
        for d in &fast {
            let grid = SpaceGrid::centered(d.radius, p.h, 1)?;
            let (inner, outer) = test_radii(d.radius);
            let q = 1.0 / (1.0 - p.m_fast);
            let i_nodes = ((0..grid.len())
                .map(|i| {
                    plateau_laplacian(grid.coords(i)[0].abs(), inner, outer, 1)
                        .abs()
                        .powf(q)
                })
                .sum::<f64>()
                * grid.cell_volume())
            .powf(1.0 - p.m_fast);
            worst = worst.max(d.boundary_term / (d.l1_t.powf(p.m_fast) * i_nodes));
        }
        r.push(Check::at_most(
            SUITE,
            "boundary_term_hoelder_bound",
            "int |u|^m |Delta phi_R| <= ||u||_1^m I(phi_R)",
            worst,
            1.0 + 1e-12,
        ));
        let direct: Vec<(f64, f64)> = fast.iter().map(|d| (d.radius, d.boundary_term)).collect();
        r.push(
            Check::within(
                SUITE,
                "boundary_term_direct_exponent",
                "decay of int |u(T)|^m |Delta phi_R| in R",
                fit_exponent(&direct),
                expected,
                0.3,
            )
            .illustrative(),
        );
    }
    r.note(format!(
        "boxes [-R, R] with R in {radii:?}, h = {}, tau = {}, T = {}; Dirichlet walls stand in for the whole line",
        p.h, p.tau, p.horizon
    ));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_functional_scales_exactly() {
        let a = boundary_functional(5.0, 0.5, 4000);
        let b = boundary_functional(10.0, 0.5, 4000);
        assert!(((a / b).log2() - 1.5).abs() < 1e-6);
    }
}

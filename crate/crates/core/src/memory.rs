//! Implicit time stepping for `d/dt (k * [u - u0]) = Delta Phi(u)` with
//! homogeneous Dirichlet data, and evaluation of the weak identity.
//!
//! Step `j` solves
//!
//! ```text
//! (b_0/tau) u^j - Delta_h Phi(u^j)
//!     = (1/tau) [ sum_{i=1}^{j-1} (b_{j-i-1} - b_{j-i}) u^i + b_{j-1} u^0 ]
//! ```
//!
//! which is the difference form of the discrete nonlocal derivative after
//! summation by parts. For nonincreasing weights the right side is a
//! nonnegative combination of past states, which is what makes the scheme
//! monotone.

use crate::error::{Error, Result};
use crate::kernel::{discrete_convolve, numeric_complement, KernelWeights, SampledFunction, TimeGrid};
use crate::nonlinearity::Nonlinearity;
use crate::spatial::{build_laplacian, check_grid, gaussian, lq_norm, mass, torsion_zeta, Field, Laplacian, SpaceGrid};

/// Damped Newton settings for one implicit step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Max-norm residual target, scaled by `max(1, (b_0/tau) ||u||_inf)`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Step-length reduction factor of the backtracking line search.
    pub damping: f64,
    /// Smallest step length tried before the step is declared failed.
    pub damping_floor: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 50,
            damping: 0.5,
            damping_floor: 2f64.powi(-20),
        }
    }
}

/// Everything needed to run the implicit scheme.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    kernel: KernelWeights,
    complement: KernelWeights,
    phi: Nonlinearity,
    grid: SpaceGrid,
    newton: NewtonOptions,
}

impl SolveConfig {
    /// Uses the numeric complement of `kernel` as `l`.
    pub fn new(kernel: KernelWeights, phi: Nonlinearity, grid: SpaceGrid) -> Result<Self> {
        let complement = numeric_complement(&kernel)?;
        Self::with_complement(kernel, complement, phi, grid)
    }

    pub fn with_complement(
        kernel: KernelWeights,
        complement: KernelWeights,
        phi: Nonlinearity,
        grid: SpaceGrid,
    ) -> Result<Self> {
        if kernel.grid() != complement.grid() {
            return Err(Error::Shape("kernel and complement use different time grids".into()));
        }
        if kernel.weights()[0] <= 0.0 {
            return Err(Error::Config("leading kernel weight must be positive".into()));
        }
        if phi.derivative_bounds().is_none() {
            return Err(Error::Config(format!(
                "nonlinearity with exponent {} has an unbounded or vanishing derivative; regularize first",
                phi.exponent()
            )));
        }
        build_laplacian(&grid)?;
        Ok(Self {
            kernel,
            complement,
            phi,
            grid,
            newton: NewtonOptions::default(),
        })
    }

    pub fn with_newton(mut self, newton: NewtonOptions) -> Result<Self> {
        if !(newton.tolerance > 0.0) {
            return Err(Error::Config("Newton tolerance must be positive".into()));
        }
        if newton.max_iterations == 0 {
            return Err(Error::Config("Newton needs at least one iteration".into()));
        }
        if !(newton.damping > 0.0 && newton.damping < 1.0) {
            return Err(Error::Config("damping factor must lie in (0, 1)".into()));
        }
        if !(newton.damping_floor > 0.0 && newton.damping_floor <= 1.0) {
            return Err(Error::Config("damping floor must lie in (0, 1]".into()));
        }
        self.newton = newton;
        Ok(self)
    }

    pub fn kernel(&self) -> &KernelWeights {
        &self.kernel
    }

    pub fn complement(&self) -> &KernelWeights {
        &self.complement
    }

    pub fn phi(&self) -> &Nonlinearity {
        &self.phi
    }

    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    pub fn tgrid(&self) -> &TimeGrid {
        self.kernel.grid()
    }

    pub fn newton(&self) -> &NewtonOptions {
        &self.newton
    }
}

/// Newton statistics for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub iterations: usize,
    pub residual: f64,
}

/// `u^0..u^J` together with the configuration that produced them.
#[derive(Debug, Clone)]
pub struct StateHistory {
    config: SolveConfig,
    states: Vec<Field>,
    reports: Vec<StepReport>,
}

impl StateHistory {
    pub fn config(&self) -> &SolveConfig {
        &self.config
    }

    pub fn states(&self) -> &[Field] {
        &self.states
    }

    pub fn state(&self, j: usize) -> &Field {
        &self.states[j]
    }

    pub fn last(&self) -> &Field {
        self.states.last().expect("history holds u^0")
    }

    /// Newton statistics for steps `1..=J`.
    pub fn step_reports(&self) -> &[StepReport] {
        &self.reports
    }

    pub fn times(&self) -> Vec<f64> {
        let g = self.config.tgrid();
        (0..self.states.len()).map(|j| g.t(j)).collect()
    }
}

/// Right side of step `j` (already divided by tau), built from `u^0..u^{j-1}`.
fn memory_rhs(b: &[f64], tau: f64, past: &[Field]) -> Vec<f64> {
    let j = past.len();
    let mut rhs: Vec<f64> = past[0].values().iter().map(|v| b[j - 1] * v).collect();
    for (i, ui) in past.iter().enumerate().skip(1) {
        let c = b[j - i - 1] - b[j - i];
        if c != 0.0 {
            for (r, v) in rhs.iter_mut().zip(ui.values()) {
                *r += c * v;
            }
        }
    }
    for r in &mut rhs {
        *r /= tau;
    }
    rhs
}

/// Advances the scheme by one step given `u^0..u^{j-1}`.
pub fn step(config: &SolveConfig, past: &[Field]) -> Result<(Field, StepReport)> {
    let j = past.len();
    if j == 0 {
        return Err(Error::Internal("step needs the initial state".into()));
    }
    if j > config.tgrid().steps() {
        return Err(Error::Config(format!("step {j} lies beyond the time grid")));
    }
    for f in past {
        check_grid(&config.grid, f.grid())?;
    }
    let b = config.kernel.weights();
    let tau = config.tgrid().tau();
    let rhs = memory_rhs(b, tau, past);
    let a = b[0] / tau;
    let lap = build_laplacian(&config.grid)?;
    let prev = past[j - 1].values();
    let (u, report) = if config.phi.exponent() < 1.0 {
        newton_in_w(config, &lap, a, &rhs, prev, j)?
    } else {
        newton_in_u(config, &lap, a, &rhs, prev, j)?
    };
    Ok((Field::new(config.grid, u)?, report))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn converged(opts: &NewtonOptions, res: f64, a: f64, u: &[f64]) -> bool {
    res <= opts.tolerance * (a * max_abs(u)).max(1.0)
}

// Residual a u - Delta_h Phi(u) - rhs, evaluated from u and w = Phi(u).
fn residual(lap: &Laplacian, a: f64, u: &[f64], w: &[f64], rhs: &[f64], out: &mut [f64]) {
    lap.apply_into(w, out);
    for i in 0..u.len() {
        out[i] = a * u[i] - out[i] - rhs[i];
    }
}

/// Newton in `w = Phi(u)`: `a Phi^{-1}(w) - Delta_h w = rhs`.
fn newton_in_w(
    config: &SolveConfig,
    lap: &Laplacian,
    a: f64,
    rhs: &[f64],
    start: &[f64],
    step_index: usize,
) -> Result<(Vec<f64>, StepReport)> {
    let phi = &config.phi;
    let opts = &config.newton;
    let n = rhs.len();
    let mut w: Vec<f64> = start.iter().map(|&u| phi.value(u)).collect();
    let mut u: Vec<f64> = w.iter().map(|&y| phi.inverse(y)).collect();
    let mut f = vec![0.0; n];
    residual(lap, a, &u, &w, rhs, &mut f);
    let mut res = max_abs(&f);
    let mut trial_w = vec![0.0; n];
    let mut trial_u = vec![0.0; n];
    let mut trial_f = vec![0.0; n];
    for it in 0..=opts.max_iterations {
        if converged(opts, res, a, &u) {
            return Ok((
                u,
                StepReport {
                    iterations: it,
                    residual: res,
                },
            ));
        }
        if it == opts.max_iterations {
            break;
        }
        let d: Vec<f64> = w.iter().map(|&y| a * phi.inverse_derivative(y)).collect();
        let neg: Vec<f64> = f.iter().map(|v| -v).collect();
        let delta = lap.solve_shifted(&d, &neg)?;
        let mut lambda = 1.0;
        loop {
            for i in 0..n {
                trial_w[i] = w[i] + lambda * delta[i];
                trial_u[i] = phi.inverse(trial_w[i]);
            }
            residual(lap, a, &trial_u, &trial_w, rhs, &mut trial_f);
            let trial_res = max_abs(&trial_f);
            if trial_res < res || lambda <= opts.damping_floor {
                if trial_res >= res && !converged(opts, trial_res, a, &trial_u) {
                    return Err(Error::StepFailure {
                        step: step_index,
                        iterations: it + 1,
                        residual: res,
                    });
                }
                std::mem::swap(&mut w, &mut trial_w);
                std::mem::swap(&mut u, &mut trial_u);
                std::mem::swap(&mut f, &mut trial_f);
                res = trial_res;
                break;
            }
            lambda *= opts.damping;
        }
    }
    Err(Error::StepFailure {
        step: step_index,
        iterations: opts.max_iterations,
        residual: res,
    })
}

/// Newton in `u`: `a u - Delta_h Phi(u) = rhs`. The Jacobian
/// `a I - Delta_h D` becomes symmetric after the substitution
/// `dw = D du`.
fn newton_in_u(
    config: &SolveConfig,
    lap: &Laplacian,
    a: f64,
    rhs: &[f64],
    start: &[f64],
    step_index: usize,
) -> Result<(Vec<f64>, StepReport)> {
    let phi = &config.phi;
    let opts = &config.newton;
    let n = rhs.len();
    let mut u = start.to_vec();
    let mut w: Vec<f64> = u.iter().map(|&x| phi.value(x)).collect();
    let mut f = vec![0.0; n];
    residual(lap, a, &u, &w, rhs, &mut f);
    let mut res = max_abs(&f);
    let mut trial_w = vec![0.0; n];
    let mut trial_u = vec![0.0; n];
    let mut trial_f = vec![0.0; n];
    for it in 0..=opts.max_iterations {
        if converged(opts, res, a, &u) {
            return Ok((
                u,
                StepReport {
                    iterations: it,
                    residual: res,
                },
            ));
        }
        if it == opts.max_iterations {
            break;
        }
        let dphi: Vec<f64> = u.iter().map(|&x| phi.derivative(x)).collect();
        let d: Vec<f64> = dphi.iter().map(|&p| a / p).collect();
        let neg: Vec<f64> = f.iter().map(|v| -v).collect();
        let dw = lap.solve_shifted(&d, &neg)?;
        let delta: Vec<f64> = dw.iter().zip(&dphi).map(|(x, p)| x / p).collect();
        let mut lambda = 1.0;
        loop {
            for i in 0..n {
                trial_u[i] = u[i] + lambda * delta[i];
                trial_w[i] = phi.value(trial_u[i]);
            }
            residual(lap, a, &trial_u, &trial_w, rhs, &mut trial_f);
            let trial_res = max_abs(&trial_f);
            if trial_res < res || lambda <= opts.damping_floor {
                if trial_res >= res && !converged(opts, trial_res, a, &trial_u) {
                    return Err(Error::StepFailure {
                        step: step_index,
                        iterations: it + 1,
                        residual: res,
                    });
                }
                std::mem::swap(&mut w, &mut trial_w);
                std::mem::swap(&mut u, &mut trial_u);
                std::mem::swap(&mut f, &mut trial_f);
                res = trial_res;
                break;
            }
            lambda *= opts.damping;
        }
    }
    Err(Error::StepFailure {
        step: step_index,
        iterations: opts.max_iterations,
        residual: res,
    })
}

/// Runs all steps of the time grid from `u0`.
pub fn solve(config: &SolveConfig, u0: &Field) -> Result<StateHistory> {
    check_grid(&config.grid, u0.grid())?;
    let steps = config.tgrid().steps();
    let mut states = Vec::with_capacity(steps + 1);
    let mut reports = Vec::with_capacity(steps);
    states.push(u0.clone());
    for j in 1..=steps {
        let (u, report) = step(config, &states)?;
        log::trace!(
            "step {j}: {} Newton iterations, residual {:e}",
            report.iterations,
            report.residual
        );
        states.push(u);
        reports.push(report);
    }
    if let Some(worst) = reports.iter().map(|r| r.iterations).max() {
        log::debug!("solved {steps} steps, at most {worst} Newton iterations per step");
    }
    Ok(StateHistory {
        config: config.clone(),
        states,
        reports,
    })
}

/// Residual of the weak identity
/// `int (u(t) - u0) phi = (l * [int Phi(u) Delta phi])(t)` at `t_1..t_J`,
/// with `Delta phi` replaced by the discrete Laplacian.
pub fn weak_residual(history: &StateHistory, test: &Field, ell: &KernelWeights) -> Result<SampledFunction> {
    let grid = history.config.grid;
    check_grid(&grid, test.grid())?;
    let tgrid = *history.config.tgrid();
    if ell.grid() != &tgrid {
        return Err(Error::Shape("complement and history use different time grids".into()));
    }
    if let Some(i) = (0..grid.len()).find(|&i| grid.touches_boundary(i) && test.values()[i] != 0.0) {
        return Err(Error::SupportViolation(i));
    }
    let lap = build_laplacian(&grid)?;
    let lphi = lap.apply(test)?;
    let vol = grid.cell_volume();
    let phi = &history.config.phi;
    let u0 = history.states[0].values();
    let rhs_integrand: Vec<f64> = history.states[1..]
        .iter()
        .map(|u| {
            u.values()
                .iter()
                .zip(lphi.values())
                .map(|(&x, &l)| phi.value(x) * l)
                .sum::<f64>()
                * vol
        })
        .collect();
    let rhs = discrete_convolve(ell, &SampledFunction::new(tgrid, rhs_integrand, None)?)?;
    let values = history.states[1..]
        .iter()
        .zip(rhs.values())
        .map(|(u, r)| {
            let lhs = u
                .values()
                .iter()
                .zip(u0)
                .zip(test.values())
                .map(|((&x, &x0), &p)| (x - x0) * p)
                .sum::<f64>()
                * vol;
            lhs - r
        })
        .collect();
    SampledFunction::new(tgrid, values, Some(0.0))
}

/// Time series of integral quantities, one entry per node `t_0..t_J`.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub t: Vec<f64>,
    pub mass: Vec<f64>,
    pub l1: Vec<f64>,
    pub l2: Vec<f64>,
    pub linf: Vec<f64>,
    /// `int u G` with `G = exp(-|x|^2)`.
    pub u_mass_g: Vec<f64>,
    /// `int |u| zeta` against the torsion function.
    pub zeta_l1: Vec<f64>,
}

pub fn diagnostics(history: &StateHistory) -> Result<Diagnostics> {
    let grid = history.config.grid;
    let g = gaussian(&grid);
    let zeta = torsion_zeta(&grid)?;
    let vol = grid.cell_volume();
    let n = history.states.len();
    let mut d = Diagnostics {
        t: history.times(),
        mass: Vec::with_capacity(n),
        l1: Vec::with_capacity(n),
        l2: Vec::with_capacity(n),
        linf: Vec::with_capacity(n),
        u_mass_g: Vec::with_capacity(n),
        zeta_l1: Vec::with_capacity(n),
    };
    for u in &history.states {
        d.mass.push(mass(u));
        d.l1.push(lq_norm(u, 1.0)?);
        d.l2.push(lq_norm(u, 2.0)?);
        d.linf.push(lq_norm(u, f64::INFINITY)?);
        d.u_mass_g
            .push(u.values().iter().zip(g.values()).map(|(a, b)| a * b).sum::<f64>() * vol);
        d.zeta_l1.push(
            u.values()
                .iter()
                .zip(zeta.values())
                .map(|(a, b)| a.abs() * b)
                .sum::<f64>()
                * vol,
        );
    }
    Ok(d)
}

//! Experiment runner behind the `tfdiff` binary: configuration, initial
//! data, CSV output and the verification suites.
//!
//! Every command resolves its parameters from three layers: command-line
//! overrides, then the JSON config, then built-in defaults. Output goes to
//! `--out`, else the config's `output`, else `$TFDIFF_OUT_DIR`, else
//! `tfdiff-out`.

pub mod config;
pub mod output;
pub mod profiles;
pub mod report;
pub mod suites;

use crate::error::{Error, Result};
use crate::kernel::{numeric_complement, rl_weights, sonine_complement, sonine_residual, KernelWeights, TimeGrid};
use crate::memory::{diagnostics, solve, SolveConfig};
use crate::nonlinearity::{power_law, regularize, Nonlinearity};
use crate::ode::solve_with_kernel;
use crate::spatial::{cutoff, Field, SpaceGrid};
pub use config::{ExperimentConfig, KernelSpec, Profile};
use output::{write_atomic, Table};
use profiles::{profile, truncate_data, ProfileParams};
pub use report::{Check, VerificationReport};
use std::path::{Path, PathBuf};
use suites::*;

/// Names accepted by `--suite` (besides `all`).
pub const SUITES: [&str; 5] = ["kernels", "contraction", "mass", "nonextinction", "benchmark"];

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "TFDIFF_OUT_DIR";

const DEFAULT_OUT_DIR: &str = "tfdiff-out";
const DEFAULT_REGULARIZATION: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Kernels,
    Ode,
    Solve,
    Verify,
}

/// Values given on the command line; each replaces the config entry.
/// `tau` and `h` stay decimal strings, as in the config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub alpha: Option<f64>,
    pub m: Option<f64>,
    pub tau: Option<String>,
    pub horizon: Option<f64>,
    pub radius: Option<f64>,
    pub h: Option<String>,
    pub seed: Option<u64>,
    pub suite: Option<String>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    /// Writes the overrides into `cfg` and revalidates it.
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if self.alpha.is_some() {
            cfg.equation.alpha = self.alpha;
        }
        if self.m.is_some() {
            cfg.equation.m = self.m;
        }
        if self.tau.is_some() {
            cfg.time.tau = self.tau.clone();
        }
        if self.horizon.is_some() {
            cfg.time.horizon = self.horizon;
        }
        if self.radius.is_some() {
            cfg.domain.radius = self.radius;
            cfg.domain.lower = None;
            cfg.domain.upper = None;
        }
        if self.h.is_some() {
            cfg.domain.h = self.h.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(s) = &self.suite {
            cfg.suites = vec![s.clone()];
        }
        if self.out.is_some() {
            cfg.output = self.out.clone();
        }
        cfg.validate()
    }
}

/// Everything a single CLI call needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub overrides: Overrides,
}

/// Loads the config (if any) and applies the overrides.
pub fn resolve_config(path: Option<&Path>, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    overrides.apply(&mut cfg)?;
    Ok(cfg)
}

pub fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output
        .clone()
        .or_else(|| {
            std::env::var_os(OUT_DIR_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
        })
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Runs one command and maps the outcome to an exit code: 0 on success,
/// 1 when a suite or run fails, 2 for a missing or malformed config.
pub fn run(inv: &Invocation) -> i32 {
    let cfg = match resolve_config(inv.config.as_deref(), &inv.overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("tfdiff: {e}");
            return 2;
        }
    };
    let dir = output_dir(&cfg);
    let outcome = match inv.command {
        Command::Kernels => cmd_kernels(&cfg, &dir).map(|_| true),
        Command::Ode => cmd_ode(&cfg, &dir).map(|_| true),
        Command::Solve => cmd_solve(&cfg, &dir).map(|_| true),
        Command::Verify => cmd_verify(&cfg, &dir).map(|r| r.all_pass()),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e @ Error::Config(_)) => {
            eprintln!("tfdiff: {e}");
            2
        }
        Err(e) => {
            eprintln!("tfdiff: {e}");
            1
        }
    }
}

fn alpha_of(cfg: &ExperimentConfig) -> f64 {
    cfg.equation.alpha.unwrap_or(0.5)
}

/// Memory kernel selected by the config on `tgrid`.
pub fn build_kernel(cfg: &ExperimentConfig, tgrid: TimeGrid) -> Result<KernelWeights> {
    match &cfg.equation.kernel {
        KernelSpec::RiemannLiouville => rl_weights(alpha_of(cfg), tgrid),
        KernelSpec::Sum { exponents } => {
            let mut k = rl_weights(exponents[0], tgrid)?;
            for &a in &exponents[1..] {
                k = k.sum(&rl_weights(a, tgrid)?)?;
            }
            Ok(k)
        }
    }
}

/// Spatial grid from the domain section; `default_radius` applies when
/// neither a radius nor explicit ends are given.
pub fn build_grid(cfg: &ExperimentConfig, default_radius: f64, default_h: f64) -> Result<SpaceGrid> {
    let d = &cfg.domain;
    let dim = d.dim.unwrap_or(1);
    let (lo, hi) = match (d.lower, d.upper) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            let r = d.radius.unwrap_or(default_radius);
            (-r, r)
        }
    };
    let h = match (&d.h, d.cells) {
        (Some(_), _) => cfg.h_or(default_h)?,
        (None, Some(n)) => (hi - lo) / n as f64,
        (None, None) => default_h,
    };
    SpaceGrid::new(dim, [lo, lo], [hi, hi], h)
}

fn profile_params(cfg: &ExperimentConfig) -> ProfileParams {
    ProfileParams {
        amplitude: cfg.data.amplitude.unwrap_or(1.0),
        width: cfg.data.width.unwrap_or(1.0),
        seed: cfg.seed,
    }
}

/// Initial data from the data section, truncated when requested.
pub fn initial_data(cfg: &ExperimentConfig, grid: &SpaceGrid) -> Result<Field> {
    let u0 = profile(cfg.data.profile.unwrap_or_default(), grid, profile_params(cfg));
    match cfg.truncation {
        Some(t) => truncate_data(&u0, t.n, t.m, &cutoff(t.n, grid)?),
        None => Ok(u0),
    }
}

/// `Phi(r) = |r|^{m-1} r`, regularized for `m != 1` with a cap one above
/// the data's sup norm.
pub fn solver_nonlinearity(cfg: &ExperimentConfig, u0: &Field) -> Result<Nonlinearity> {
    let m = cfg.equation.m.unwrap_or(1.0);
    let phi = power_law(m)?;
    if m == 1.0 {
        Ok(phi)
    } else {
        regularize(
            &phi,
            u0.max_abs() + 1.0,
            cfg.regularization.unwrap_or(DEFAULT_REGULARIZATION),
        )
    }
}

/// Writes `kernels.csv`: weights of `k`, its complements and the pair
/// residuals at `t_1..t_J`.
pub fn cmd_kernels(cfg: &ExperimentConfig, dir: &Path) -> Result<PathBuf> {
    let tgrid = TimeGrid::with_horizon(cfg.tau_or(1e-3)?, cfg.time.horizon.unwrap_or(1.0))?;
    let k = build_kernel(cfg, tgrid)?;
    let numeric = numeric_complement(&k)?;
    let residual_numeric = sonine_residual(&k, &numeric)?;
    let n = tgrid.steps();
    let (exact, residual_exact) = match cfg.equation.kernel {
        KernelSpec::RiemannLiouville => {
            let l = sonine_complement(alpha_of(cfg), tgrid)?;
            let res = sonine_residual(&k, &l)?;
            (l.weights().to_vec(), res)
        }
        KernelSpec::Sum { .. } => (vec![f64::NAN; n], vec![f64::NAN; n]),
    };
    let t: Vec<f64> = (1..=n).map(|j| tgrid.t(j)).collect();
    let table = Table::from_columns(
        &["t", "k", "ell", "ell_numeric", "residual", "residual_numeric"],
        &[
            &t,
            k.weights(),
            &exact,
            numeric.weights(),
            &residual_exact,
            &residual_numeric,
        ],
    )?;
    let path = dir.join("kernels.csv");
    write_atomic(&path, &table.to_csv())?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

/// Writes `ode.csv` with the solution of `d/dt(k * [v - v0]) = -lambda v^m`.
pub fn cmd_ode(cfg: &ExperimentConfig, dir: &Path) -> Result<PathBuf> {
    let tgrid = TimeGrid::with_horizon(cfg.tau_or(1e-2)?, cfg.time.horizon.unwrap_or(10.0))?;
    let k = build_kernel(cfg, tgrid)?;
    let lambda = cfg.equation.lambda.unwrap_or(1.0);
    let m = cfg.equation.m.unwrap_or(1.0);
    let v0 = cfg.data.amplitude.unwrap_or(1.0);
    let v = solve_with_kernel(&k, lambda, m, v0)?;
    let mut table = Table::new(&["t", "v"]);
    table.push(vec![0.0, v0])?;
    for (j, &x) in v.values().iter().enumerate() {
        table.push(vec![tgrid.t(j + 1), x])?;
    }
    let path = dir.join("ode.csv");
    write_atomic(&path, &table.to_csv())?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

/// Solves the PDE and writes `solve.csv` with columns
/// `t,mass,l1,l2,linf,u_mass_G`.
pub fn cmd_solve(cfg: &ExperimentConfig, dir: &Path) -> Result<PathBuf> {
    let grid = build_grid(cfg, 5.0, 0.1)?;
    let tgrid = TimeGrid::with_horizon(cfg.tau_or(1e-2)?, cfg.time.horizon.unwrap_or(1.0))?;
    let u0 = initial_data(cfg, &grid)?;
    let config = SolveConfig::new(build_kernel(cfg, tgrid)?, solver_nonlinearity(cfg, &u0)?, grid)?;
    let history = solve(&config, &u0)?;
    let d = diagnostics(&history)?;
    let table = Table::from_columns(
        &["t", "mass", "l1", "l2", "linf", "u_mass_G"],
        &[&d.t, &d.mass, &d.l1, &d.l2, &d.linf, &d.u_mass_g],
    )?;
    let path = dir.join("solve.csv");
    write_atomic(&path, &table.to_csv())?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

/// Suites selected by the config; empty or `all` means every suite.
pub fn selected_suites(cfg: &ExperimentConfig) -> Vec<&'static str> {
    if cfg.suites.is_empty() || cfg.suites.iter().any(|s| s == "all") {
        return SUITES.to_vec();
    }
    SUITES
        .iter()
        .copied()
        .filter(|s| cfg.suites.iter().any(|c| c == s))
        .collect()
}

fn zero_data(cfg: &ExperimentConfig) -> bool {
    cfg.data.profile == Some(Profile::Zero)
}

pub fn kernel_params(cfg: &ExperimentConfig) -> Result<KernelParams> {
    let d = KernelParams::default();
    Ok(KernelParams {
        alphas: cfg.equation.alpha.map_or(d.alphas, |a| vec![a]),
        tau: cfg.tau_or(d.tau)?,
        horizon: cfg.time.horizon.unwrap_or(d.horizon),
        seed: cfg.seed,
        ..d
    })
}

pub fn contraction_params(cfg: &ExperimentConfig) -> Result<ContractionParams> {
    let d = ContractionParams::default();
    Ok(ContractionParams {
        pairs: cfg.contraction_pairs.unwrap_or(d.pairs),
        ms: cfg.equation.m.map_or(d.ms, |m| vec![m]),
        alphas: cfg.equation.alpha.map_or(d.alphas, |a| vec![a]),
        radius: cfg.domain.radius.unwrap_or(d.radius),
        h: cfg.h_or(d.h)?,
        tau: cfg.tau_or(d.tau)?,
        horizon: cfg.time.horizon.unwrap_or(d.horizon),
        regularization: cfg.regularization.unwrap_or(d.regularization),
        seed: cfg.seed,
    })
}

pub fn mass_params(cfg: &ExperimentConfig) -> Result<MassParams> {
    let d = MassParams::default();
    let m = cfg.equation.m;
    Ok(MassParams {
        alpha: cfg.equation.alpha.unwrap_or(d.alpha),
        m_fast: m.filter(|&m| m < 1.0).unwrap_or(d.m_fast),
        m_slow: m.filter(|&m| m > 1.0).unwrap_or(d.m_slow),
        radius: cfg.domain.radius.unwrap_or(d.radius),
        h: cfg.h_or(d.h)?,
        tau: cfg.tau_or(d.tau)?,
        horizon: cfg.time.horizon.unwrap_or(d.horizon),
        regularization: cfg.regularization.unwrap_or(d.regularization),
        amplitude: if zero_data(cfg) {
            0.0
        } else {
            cfg.data.amplitude.unwrap_or(d.amplitude)
        },
        width: cfg.data.width.unwrap_or(d.width),
    })
}

pub fn nonextinction_params(cfg: &ExperimentConfig) -> Result<NonextinctionParams> {
    let d = NonextinctionParams::default();
    let m = cfg.equation.m.unwrap_or(d.m);
    if m >= 1.0 {
        return Err(Error::Config(format!(
            "nonextinction needs fast diffusion m < 1, got {m}"
        )));
    }
    Ok(NonextinctionParams {
        alpha: cfg.equation.alpha.unwrap_or(d.alpha),
        m,
        dim: cfg.domain.dim.unwrap_or(d.dim),
        radius: cfg.domain.radius.unwrap_or(d.radius),
        h: cfg.h_or(d.h)?,
        tau: cfg.tau_or(d.tau)?,
        horizon: cfg.time.horizon.unwrap_or(d.horizon),
        regularization: cfg.regularization.unwrap_or(d.regularization),
        amplitude: if zero_data(cfg) {
            0.0
        } else {
            cfg.data.amplitude.unwrap_or(d.amplitude)
        },
        width: cfg.data.width.unwrap_or(d.width),
        ..d
    })
}

pub fn benchmark_params(cfg: &ExperimentConfig) -> Result<BenchmarkParams> {
    let d = BenchmarkParams::default();
    Ok(BenchmarkParams {
        alpha: cfg.equation.alpha.unwrap_or(d.alpha),
        tau: cfg.tau_or(d.tau)?,
        h: cfg.h_or(d.h)?,
        horizon: cfg.time.horizon.unwrap_or(d.horizon),
    })
}

/// Runs one named suite with parameters taken from `cfg`.
pub fn run_suite(name: &str, cfg: &ExperimentConfig) -> Result<VerificationReport> {
    log::info!("running suite {name}");
    match name {
        "kernels" => suite_kernels(&kernel_params(cfg)?),
        "contraction" => suite_contraction(&contraction_params(cfg)?),
        "mass" => suite_mass(&mass_params(cfg)?),
        "nonextinction" => suite_nonextinction(&nonextinction_params(cfg)?),
        "benchmark" => suite_benchmark(&benchmark_params(cfg)?),
        other => Err(Error::Config(format!("unknown suite {other:?}"))),
    }
}

/// Runs the selected suites, writes `report.json` and prints a summary.
pub fn cmd_verify(cfg: &ExperimentConfig, dir: &Path) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    report.note("all runs use bounded boxes with zero Dirichlet data in place of the whole space");
    for name in selected_suites(cfg) {
        report.merge(run_suite(name, cfg)?);
    }
    let path = dir.join("report.json");
    write_atomic(&path, &report.to_json())?;
    for c in report.failures() {
        println!(
            "FAIL {}::{} measured {} tolerance {}",
            c.suite, c.name, c.measured, c.tolerance
        );
    }
    let s = report.summary;
    println!(
        "{} checks: {} passed, {} failed, {} illustrative; report at {}",
        s.total,
        s.passed,
        s.failed,
        s.illustrative,
        path.display()
    );
    Ok(report)
}

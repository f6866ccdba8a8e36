//! L1 contraction, comparison and norm decay over seeded random data.

use crate::error::Result;
use crate::harness::profiles::{random_field, ProfileParams};
use crate::harness::report::{Check, VerificationReport};
use crate::kernel::{discrete_convolve, rl_weights, SampledFunction, TimeGrid};
use crate::memory::{solve, SolveConfig, StateHistory};
use crate::nonlinearity::{power_law, regularize, Nonlinearity};
use crate::spatial::{lq_norm, torsion_zeta, Field, SpaceGrid};
use rayon::prelude::*;

const SUITE: &str = "contraction";

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionParams {
    pub pairs: usize,
    pub ms: Vec<f64>,
    pub alphas: Vec<f64>,
    pub radius: f64,
    pub h: f64,
    pub tau: f64,
    pub horizon: f64,
    pub regularization: u32,
    pub seed: u64,
}

impl Default for ContractionParams {
    fn default() -> Self {
        Self {
            pairs: 50,
            ms: vec![0.5, 1.0, 2.0],
            alphas: vec![0.25, 0.5, 0.75],
            radius: 4.0,
            h: 0.1,
            tau: 0.02,
            horizon: 1.0,
            regularization: 1000,
            seed: 0,
        }
    }
}

/// Largest excess of each monitored quantity over its bound, for one pair.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PairOutcome {
    pub l1: f64,
    pub positive_part: f64,
    pub weighted: f64,
    pub order: f64,
    pub lq: [f64; 3],
    pub failed: bool,
}

fn law(m: f64, cap: f64, n: u32) -> Result<Nonlinearity> {
    let p = power_law(m)?;
    if m == 1.0 {
        Ok(p)
    } else {
        regularize(&p, cap, n)
    }
}

fn diff_norms(u: &Field, v: &Field, zeta: &[f64]) -> (f64, f64, f64) {
    let vol = u.grid().cell_volume();
    let mut l1 = 0.0;
    let mut pos = 0.0;
    let mut w = 0.0;
    for ((a, b), z) in u.values().iter().zip(v.values()).zip(zeta) {
        let d = a - b;
        l1 += d.abs();
        pos += d.max(0.0);
        w += d.abs() * z;
    }
    (l1 * vol, pos * vol, w * vol)
}

/// Runs one `(u0, v0)` pair plus an ordered companion `v0 + |w|` and
/// measures every contraction-type bound.
pub fn run_pair(cfg: &SolveConfig, u0: &Field, v0: &Field, lift: &Field) -> Result<PairOutcome> {
    let grid = *cfg.grid();
    let zeta = torsion_zeta(&grid)?;
    let upper = u0.zip_map(lift, |a, b| a + b.abs())?;
    let hu = solve(cfg, u0)?;
    let hv = solve(cfg, v0)?;
    let hw = solve(cfg, &upper)?;
    measure(cfg, &hu, &hv, &hw, zeta.values())
}

fn measure(
    cfg: &SolveConfig,
    hu: &StateHistory,
    hv: &StateHistory,
    hw: &StateHistory,
    zeta: &[f64],
) -> Result<PairOutcome> {
    let phi = cfg.phi();
    let (l1_0, pos_0, w_0) = diff_norms(&hu.states()[0], &hv.states()[0], zeta);
    let mut out = PairOutcome {
        l1: f64::NEG_INFINITY,
        positive_part: f64::NEG_INFINITY,
        weighted: f64::NEG_INFINITY,
        order: f64::NEG_INFINITY,
        lq: [f64::NEG_INFINITY; 3],
        failed: false,
    };
    let vol = cfg.grid().cell_volume();
    // ||Phi(u^j) - Phi(v^j)||_1 for j = 1..J, convolved with l below
    let mut flux = Vec::with_capacity(hu.states().len() - 1);
    for (u, v) in hu.states()[1..].iter().zip(&hv.states()[1..]) {
        flux.push(
            u.values()
                .iter()
                .zip(v.values())
                .map(|(a, b)| (phi.value(*a) - phi.value(*b)).abs())
                .sum::<f64>()
                * vol,
        );
    }
    let tgrid = *cfg.tgrid();
    let memory = discrete_convolve(cfg.complement(), &SampledFunction::new(tgrid, flux, None)?)?;
    let u0 = &hu.states()[0];
    let q0 = [lq_norm(u0, 1.0)?, lq_norm(u0, 2.0)?, lq_norm(u0, f64::INFINITY)?];
    for j in 0..hu.states().len() {
        let (u, v, w) = (&hu.states()[j], &hv.states()[j], &hw.states()[j]);
        let (l1, pos, weighted) = diff_norms(u, v, zeta);
        out.l1 = out.l1.max(l1 - l1_0);
        out.positive_part = out.positive_part.max(pos - pos_0);
        let mem = memory.at(j).unwrap_or(0.0);
        out.weighted = out.weighted.max(weighted + mem - w_0);
        let gap = u
            .values()
            .iter()
            .zip(w.values())
            .map(|(a, b)| a - b)
            .fold(f64::NEG_INFINITY, f64::max);
        out.order = out.order.max(gap);
        let qs = [lq_norm(u, 1.0)?, lq_norm(u, 2.0)?, lq_norm(u, f64::INFINITY)?];
        for k in 0..3 {
            out.lq[k] = out.lq[k].max(qs[k] - q0[k]);
        }
    }
    Ok(out)
}

fn pair_seed(base: u64, cell: usize, pair: usize) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((cell as u64) << 32)
        .wrapping_add(pair as u64)
}

pub fn suite_contraction(p: &ContractionParams) -> Result<VerificationReport> {
    let grid = SpaceGrid::centered(p.radius, p.h, 1)?;
    let tgrid = TimeGrid::with_horizon(p.tau, p.horizon)?;
    let cells: Vec<(f64, f64)> =
        p.ms.iter()
            .flat_map(|&m| p.alphas.iter().map(move |&a| (m, a)))
            .collect();
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..p.pairs).map(move |k| (c, k)))
        .collect();
    let outcomes: Vec<PairOutcome> = jobs
        .par_iter()
        .map(|&(c, k)| {
            let (m, alpha) = cells[c];
            let seed = pair_seed(p.seed, c, k);
            let params = |s: u64| ProfileParams {
                amplitude: 2.0,
                width: 1.0,
                seed: s,
            };
            let u0 = random_field(&grid, params(seed), true);
            let v0 = random_field(&grid, params(seed ^ 0xA5A5), true);
            let lift = random_field(&grid, params(seed ^ 0x5A5A), false);
            let cap = u0.max_abs().max(v0.max_abs()) + lift.max_abs() + 1.0;
            let run = || -> Result<PairOutcome> {
                let cfg = SolveConfig::new(rl_weights(alpha, tgrid)?, law(m, cap, p.regularization)?, grid)?;
                run_pair(&cfg, &u0, &v0, &lift)
            };
            run().unwrap_or_else(|e| {
                log::warn!("pair {k} (m {m}, alpha {alpha}) failed: {e}");
                PairOutcome {
                    failed: true,
                    ..PairOutcome::default()
                }
            })
        })
        .collect();

    let mut r = VerificationReport::new();
    for (c, &(m, alpha)) in cells.iter().enumerate() {
        let cell: Vec<&PairOutcome> = outcomes[c * p.pairs..(c + 1) * p.pairs].iter().collect();
        let worst = |f: &dyn Fn(&PairOutcome) -> f64| {
            cell.iter()
                .filter(|o| !o.failed)
                .map(|o| f(o))
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let tag = format!("[m={m},alpha={alpha}]");
        let failures = cell.iter().filter(|o| o.failed).count();
        r.push(Check::at_most(
            SUITE,
            &format!("solver_failures{tag}"),
            "every pair solves",
            failures as f64,
            0.0,
        ));
        r.push(Check::at_most(
            SUITE,
            &format!("l1_contraction{tag}"),
            "||u(t) - v(t)||_1 <= ||u0 - v0||_1",
            worst(&|o| o.l1),
            1e-8,
        ));
        r.push(Check::at_most(
            SUITE,
            &format!("positive_part_contraction{tag}"),
            "||[u(t) - v(t)]_+||_1 <= ||[u0 - v0]_+||_1",
            worst(&|o| o.positive_part),
            1e-8,
        ));
        r.push(Check::at_most(
            SUITE,
            &format!("comparison{tag}"),
            "u0 <= v0 implies u <= v",
            worst(&|o| o.order),
            1e-10,
        ));
        for (k, q) in ["1", "2", "inf"].iter().enumerate() {
            r.push(Check::at_most(
                SUITE,
                &format!("lq_nonincrease[q={q}]{tag}"),
                "||u(t)||_q <= ||u0||_q",
                worst(&|o| o.lq[k]),
                1e-8,
            ));
        }
        r.push(Check::at_most(
            SUITE,
            &format!("weighted_contraction{tag}"),
            "||u - v||_{L1(zeta)} + l * ||Phi(u) - Phi(v)||_1 <= ||u0 - v0||_{L1(zeta)}",
            worst(&|o| o.weighted),
            1e-6,
        ));
    }

    // identical data: every difference must vanish
    let cfg = SolveConfig::new(rl_weights(0.5, tgrid)?, law(0.5, 3.0, p.regularization)?, grid)?;
    let u0 = random_field(
        &grid,
        ProfileParams {
            amplitude: 1.0,
            width: 1.0,
            seed: p.seed,
        },
        true,
    );
    let zero = Field::zeros(grid);
    let same = run_pair(&cfg, &u0, &u0, &zero)?;
    r.push(Check::at_most(
        SUITE,
        "identical_pair",
        "equal data give equal solutions",
        same.l1.max(same.order).max(same.positive_part),
        0.0,
    ));
    r.note(format!(
        "{} pairs per (m, alpha) cell on [-{}, {}], h = {}, tau = {}, T = {}",
        p.pairs, p.radius, p.radius, p.h, p.tau, p.horizon
    ));
    Ok(r)
}

//! Kernel calculus checks: complement pairs, power rule, Yosida kernels,
//! and the discrete convexity inequality.

use crate::error::Result;
use crate::harness::report::{Check, VerificationReport};
use crate::kernel::{
    discrete_convolve, max_sonine_residual, nonlocal_derivative, numeric_complement, resolvent_kernel, rl_weights,
    sonine_complement, sonine_residual, volterra_relaxation, yosida_kernel, KernelWeights, SampledFunction, TimeGrid,
};
use crate::ode::mittag_leffler;
use crate::special::gamma;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SUITE: &str = "kernels";

#[derive(Debug, Clone, PartialEq)]
pub struct KernelParams {
    pub alphas: Vec<f64>,
    /// Finest step of the refinement ladder `4 tau, 2 tau, tau`.
    pub tau: f64,
    pub horizon: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self {
            alphas: vec![0.25, 0.5, 0.75],
            tau: 1e-3,
            horizon: 1.0,
            trials: 100,
            seed: 0,
        }
    }
}

fn ladder(p: &KernelParams) -> Result<[TimeGrid; 3]> {
    Ok([
        TimeGrid::with_horizon(4.0 * p.tau, p.horizon)?,
        TimeGrid::with_horizon(2.0 * p.tau, p.horizon)?,
        TimeGrid::with_horizon(p.tau, p.horizon)?,
    ])
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

// Largest ratio between consecutive refinements; below 1 means decreasing.
fn worst_ratio(values: &[f64]) -> f64 {
    values.windows(2).map(|w| w[1] / w[0]).fold(f64::NEG_INFINITY, f64::max)
}

/// Nodal, tail and integrated residuals of the pair `(g_alpha, g_{1-alpha})`.
pub fn sonine_checks(p: &KernelParams) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let grids = ladder(p)?;
    for &alpha in &p.alphas {
        let mut nodal = Vec::new();
        let mut tail = Vec::new();
        let mut integrated = Vec::new();
        for g in &grids {
            let r = sonine_residual(&rl_weights(alpha, *g)?, &sonine_complement(alpha, *g)?)?;
            nodal.push(max_abs(&r));
            let first = (0.1 * g.steps() as f64).ceil() as usize;
            tail.push(max_abs(&r[first.saturating_sub(1)..]));
            let mut acc = 0.0f64;
            let mut worst = 0.0f64;
            for x in &r {
                acc += x * g.tau();
                worst = worst.max(acc.abs());
            }
            integrated.push(worst);
        }
        let anchor = "g_alpha * g_{1-alpha} = 1 on the time grid";
        out.push(Check::at_most(
            SUITE,
            &format!("sonine_residual_max[alpha={alpha}]"),
            anchor,
            nodal[2],
            5e-3,
        ));
        out.push(Check::at_most(
            SUITE,
            &format!("sonine_residual_decreasing[alpha={alpha}]"),
            "nodal Sonine residual shrinks under step halving",
            worst_ratio(&nodal),
            1.0 - 1e-9,
        ));
        out.push(
            Check::at_most(
                SUITE,
                &format!("sonine_residual_tail[alpha={alpha}]"),
                "Sonine residual away from t = 0 (t >= T/10)",
                tail[2],
                5e-3,
            )
            .illustrative(),
        );
        out.push(
            Check::at_most(
                SUITE,
                &format!("sonine_residual_tail_decreasing[alpha={alpha}]"),
                "tail Sonine residual shrinks under step halving",
                worst_ratio(&tail),
                1.0 - 1e-9,
            )
            .illustrative(),
        );
        out.push(
            Check::at_most(
                SUITE,
                &format!("sonine_residual_integrated[alpha={alpha}]"),
                "max_t |int_0^t (k*l - 1)|",
                integrated[2],
                5e-3,
            )
            .illustrative(),
        );
    }
    Ok(out)
}

/// Power rule for `t` and `t^2` at `t = T`: error at the finest step and
/// the observed order over the ladder.
pub fn power_rule_checks(p: &KernelParams) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let grids = ladder(p)?;
    let t_end = p.horizon;
    for &alpha in &p.alphas {
        for beta in [1i32, 2] {
            let exact = gamma(f64::from(beta) + 1.0) / gamma(f64::from(beta) + 1.0 - alpha)
                * t_end.powf(f64::from(beta) - alpha);
            let mut errs = Vec::new();
            for g in &grids {
                let b = rl_weights(alpha, *g)?;
                let u = SampledFunction::from_fn(*g, |t| t.powi(beta));
                errs.push((nonlocal_derivative(&b, &u, 0.0)?.last() - exact).abs());
            }
            out.push(Check::at_most(
                SUITE,
                &format!("power_rule_error[alpha={alpha},beta={beta}]"),
                "discrete Caputo derivative of t^beta",
                errs[2] / exact,
                0.01,
            ));
            // a linear u is reproduced exactly, so no order can be observed
            let order = if errs.iter().all(|&e| e <= 1e-12 * exact) {
                f64::INFINITY
            } else {
                errs.windows(2)
                    .map(|w| (w[0] / w[1]).log2())
                    .fold(f64::INFINITY, f64::min)
            };
            out.push(Check::at_least(
                SUITE,
                &format!("power_rule_order[alpha={alpha},beta={beta}]"),
                "convergence order of the discrete Caputo derivative",
                order,
                0.9,
            ));
        }
    }
    Ok(out)
}

const YOSIDA_INDICES: [u32; 7] = [1, 2, 4, 8, 16, 32, 64];

/// The discrete `k_n` resolves the time scale `1/n` only while `n tau` is
/// small, so the Yosida ladder keeps `64 tau <= 1e-2`.
pub fn yosida_grid(p: &KernelParams) -> Result<TimeGrid> {
    TimeGrid::with_horizon(p.tau.min(1e-2 / 64.0), p.horizon)
}

/// Relaxation oracle, resolvent and Yosida identities, and convergence of
/// the Yosida kernels.
pub fn yosida_checks(p: &KernelParams) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let grid = TimeGrid::with_horizon(p.tau, p.horizon)?;
    for &alpha in &p.alphas {
        let ell = sonine_complement(alpha, grid)?;
        let s = volterra_relaxation(&ell, 1)?;
        let oracle = mittag_leffler(alpha, -p.horizon.powf(alpha))?;
        out.push(Check::within(
            SUITE,
            &format!("relaxation_oracle[alpha={alpha}]"),
            "s + (s * g_{1-alpha}) = 1 solved by E_alpha(-t^alpha)",
            s.last(),
            oracle,
            1e-2,
        ));
        let monotone = s.at(0) == Some(1.0)
            && s.values().iter().all(|&v| (0.0..=1.0).contains(&v))
            && s.values().windows(2).all(|w| w[1] <= w[0]);
        out.push(Check::holds(
            SUITE,
            &format!("relaxation_monotone[alpha={alpha}]"),
            "relaxation function starts at 1, is nonnegative and nonincreasing",
            monotone,
        ));

        let fine = yosida_grid(p)?;
        let k = rl_weights(alpha, fine)?;
        let pair = numeric_complement(&k)?;
        let mut identity = 0.0f64;
        let mut distances = Vec::new();
        let mut reach = Vec::new();
        let mut resolvent_min = f64::INFINITY;
        let mut weights_ok = true;
        for &n in &YOSIDA_INDICES {
            let sn = volterra_relaxation(&pair, n)?;
            let hn = resolvent_kernel(&pair, n)?;
            resolvent_min = resolvent_min.min(hn.values().iter().copied().fold(f64::INFINITY, f64::min));
            let khn = discrete_convolve(&k, &hn)?;
            let nf = f64::from(n);
            for (a, b) in khn.values().iter().zip(sn.values()) {
                identity = identity.max((a - nf * b).abs());
            }
            reach.push(hn.values().iter().sum::<f64>() * fine.tau());
            let kn = yosida_kernel(&k, &pair, n)?;
            weights_ok &= is_valid(&kn);
            distances.push(kn.l1_distance(&k)?);
        }
        out.push(Check::at_most(
            SUITE,
            &format!("yosida_identity[alpha={alpha}]"),
            "k * h_n = n s_n",
            identity,
            1e-8,
        ));
        out.push(Check::at_least(
            SUITE,
            &format!("resolvent_nonnegative[alpha={alpha}]"),
            "resolvent kernel h_n is nonnegative",
            resolvent_min,
            0.0,
        ));
        out.push(Check::holds(
            SUITE,
            &format!("yosida_weights_valid[alpha={alpha}]"),
            "Yosida kernel weights are nonnegative and nonincreasing",
            weights_ok,
        ));
        out.push(Check::at_most(
            SUITE,
            &format!("yosida_l1_decreasing[alpha={alpha}]"),
            "||k_n - k||_L1 strictly decreases in n",
            worst_ratio(&distances),
            1.0 - 1e-9,
        ));
        out.push(Check::at_most(
            SUITE,
            &format!("yosida_l1_halved[alpha={alpha}]"),
            "||k_64 - k|| below half of ||k_1 - k||",
            distances[distances.len() - 1] / distances[0],
            0.5,
        ));
        let approaching = reach.windows(2).all(|w| w[1] > w[0]) && reach.iter().all(|&r| r <= 1.0 + 1e-12);
        out.push(Check::holds(
            SUITE,
            &format!("resolvent_approximate_identity[alpha={alpha}]"),
            "(h_n * 1)(T) increases towards 1 with n",
            approaching,
        ));
    }
    Ok(out)
}

fn is_valid(w: &KernelWeights) -> bool {
    let b = w.weights();
    b.iter().all(|&x| x >= 0.0) && b.windows(2).all(|p| p[1] <= p[0] * (1.0 + 64.0 * f64::EPSILON))
}

/// Numeric complements of `g_alpha` and of `g_0.3 + g_0.6`.
pub fn complement_checks(p: &KernelParams) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let grid = TimeGrid::with_horizon(p.tau, p.horizon)?;
    for &alpha in &p.alphas {
        let k = rl_weights(alpha, grid)?;
        let ell = numeric_complement(&k)?;
        out.push(Check::at_most(
            SUITE,
            &format!("numeric_complement_residual[alpha={alpha}]"),
            "numeric complement solves k * l = 1 at every node",
            max_sonine_residual(&k, &ell)?,
            1e-10,
        ));
        let closed = rl_weights(1.0 - alpha, grid)?;
        let gap = ell
            .weights()
            .iter()
            .zip(closed.weights())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        out.push(Check::at_most(
            SUITE,
            &format!("numeric_complement_vs_closed_form[alpha={alpha}]"),
            "numeric complement of g_alpha approximates g_{1-alpha}",
            gap,
            5e-3,
        ));
        out.push(Check::holds(
            SUITE,
            &format!("weights_valid[alpha={alpha}]"),
            "kernel weights are nonnegative and nonincreasing",
            is_valid(&k) && is_valid(&ell) && is_valid(&closed),
        ));
    }
    let mixed = rl_weights(0.3, grid)?.sum(&rl_weights(0.6, grid)?)?;
    let ell = numeric_complement(&mixed)?;
    out.push(Check::at_most(
        SUITE,
        "numeric_complement_residual[g0.3+g0.6]",
        "numeric complement of a sum of kernels solves k * l = 1",
        max_sonine_residual(&mixed, &ell)?,
        1e-10,
    ));
    out.push(Check::at_least(
        SUITE,
        "numeric_complement_nonnegative[g0.3+g0.6]",
        "numeric complement of a sum of kernels is nonnegative",
        ell.weights().iter().copied().fold(f64::INFINITY, f64::min),
        0.0,
    ));
    Ok(out)
}

/// Convex test functions for the chain-rule inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvexFn {
    Square,
    PositivePartSquared,
    SmoothedPower,
}

impl ConvexFn {
    const ALL: [ConvexFn; 3] = [ConvexFn::Square, ConvexFn::PositivePartSquared, ConvexFn::SmoothedPower];
    const EPS2: f64 = 1e-2;

    pub fn value(self, y: f64) -> f64 {
        match self {
            ConvexFn::Square => y * y,
            ConvexFn::PositivePartSquared => y.max(0.0).powi(2),
            ConvexFn::SmoothedPower => (y * y + Self::EPS2).powf(0.75),
        }
    }

    pub fn derivative(self, y: f64) -> f64 {
        match self {
            ConvexFn::Square => 2.0 * y,
            ConvexFn::PositivePartSquared => 2.0 * y.max(0.0),
            ConvexFn::SmoothedPower => 1.5 * y * (y * y + Self::EPS2).powf(-0.25),
        }
    }
}

/// Largest violation of `H'(u_j) D_j(u) >= D_j(H(u))` over one trial.
pub fn chain_rule_defect(b: &KernelWeights, u: &SampledFunction, u0: f64, h: ConvexFn) -> Result<f64> {
    let du = nonlocal_derivative(b, u, u0)?;
    let hu = SampledFunction::new(*u.grid(), u.values().iter().map(|&x| h.value(x)).collect(), None)?;
    let dh = nonlocal_derivative(b, &hu, h.value(u0))?;
    Ok(u.values()
        .iter()
        .zip(du.values())
        .zip(dh.values())
        .map(|((&x, &d), &e)| e - h.derivative(x) * d)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Seeded randomized trials of the discrete convexity inequality.
pub fn chain_rule_checks(p: &KernelParams) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut violations = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for trial in 0..p.trials {
        let alpha = rng.random_range(0.05..0.95);
        let steps = rng.random_range(5..=60);
        let tau = 10f64.powf(rng.random_range(-3.0..0.0));
        let grid = TimeGrid::new(tau, steps)?;
        let b = rl_weights(alpha, grid)?;
        let u0 = rng.random_range(-2.0..2.0);
        let values = (0..steps).map(|_| rng.random_range(-2.0..2.0)).collect();
        let u = SampledFunction::new(grid, values, None)?;
        let h = ConvexFn::ALL[trial % 3];
        let defect = chain_rule_defect(&b, &u, u0, h)?;
        worst = worst.max(defect);
        if defect > 1e-10 {
            violations += 1;
        }
    }
    Ok(vec![
        Check::at_most(
            SUITE,
            "chain_rule_violations",
            "H'(u) D(u) >= D(H(u)) for convex H",
            violations as f64,
            0.0,
        ),
        Check::at_most(
            SUITE,
            "chain_rule_worst_defect",
            "largest D(H(u)) - H'(u) D(u)",
            worst,
            1e-10,
        )
        .illustrative(),
    ])
}

pub fn suite_kernels(p: &KernelParams) -> Result<VerificationReport> {
    let mut r = VerificationReport::new();
    r.extend(sonine_checks(p)?);
    r.extend(power_rule_checks(p)?);
    r.extend(yosida_checks(p)?);
    r.extend(complement_checks(p)?);
    r.extend(chain_rule_checks(p)?);
    r.note("Yosida kernels use the numeric complement of g_alpha, the discrete pair with k * l = 1 exactly");
    Ok(r)
}

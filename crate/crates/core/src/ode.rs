//! The scalar problem `d/dt (g_alpha * [v - v0]) = -lambda v^m`, the
//! Mittag-Leffler function used as its `m = 1` oracle, and the decay and
//! comparison checks built on top of it.

use crate::error::{domain, Error, Result};
use crate::kernel::{rl_weights, KernelWeights, SampledFunction, TimeGrid};
use crate::special::{integrate, ln_gamma, rgamma};
use std::f64::consts::PI;

/// Parameters of the scalar fractional relaxation problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeProblem {
    pub alpha: f64,
    pub lambda: f64,
    pub m: f64,
    pub v0: f64,
    pub tgrid: TimeGrid,
}

impl OdeProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return domain(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return domain(format!("lambda must be nonnegative, got {}", self.lambda));
        }
        if !(self.m.is_finite() && self.m > 0.0) {
            return domain(format!("m must be positive, got {}", self.m));
        }
        if !(self.v0.is_finite() && self.v0 > 0.0) {
            return domain(format!("v0 must be positive, got {}", self.v0));
        }
        Ok(())
    }
}

/// Implicit product-integration solve; returns `v_1..v_J` with `v0` as the
/// initial value.
pub fn solve_power_ode(p: &OdeProblem) -> Result<SampledFunction> {
    p.validate()?;
    let k = rl_weights(p.alpha, p.tgrid)?;
    solve_with_kernel(&k, p.lambda, p.m, p.v0)
}

/// Same scheme for an arbitrary kernel: each step solves
/// `b_0 v_j + tau lambda v_j^m = sum_{i<j} (b_{j-i-1} - b_{j-i}) v_i + b_{j-1} v_0`.
pub fn solve_with_kernel(k: &KernelWeights, lambda: f64, m: f64, v0: f64) -> Result<SampledFunction> {
    let b = k.weights();
    let tau = k.grid().tau();
    if !(b[0] > 0.0) {
        return Err(Error::SingularDeconvolution(b[0]));
    }
    let mut v: Vec<f64> = Vec::with_capacity(b.len());
    for j in 1..=b.len() {
        let mut rhs = b[j - 1] * v0;
        for i in 1..j {
            rhs += (b[j - i - 1] - b[j - i]) * v[i - 1];
        }
        let vj = scalar_root(b[0], tau * lambda, m, rhs)
            .ok_or_else(|| Error::Internal(format!("scalar solve failed at step {j}")))?;
        v.push(vj);
    }
    SampledFunction::new(*k.grid(), v, Some(v0))
}

// Root of a v + c v^m = r on (0, r/a], for r > 0, c >= 0.
fn scalar_root(a: f64, c: f64, m: f64, r: f64) -> Option<f64> {
    if r <= 0.0 {
        return (r == 0.0).then_some(0.0);
    }
    let hi0 = r / a;
    if c == 0.0 {
        return Some(hi0);
    }
    let g = |v: f64| a * v + c * v.powf(m) - r;
    let (mut lo, mut hi) = (0.0, hi0);
    let mut x = hi;
    for _ in 0..200 {
        let gx = g(x);
        if gx == 0.0 {
            return Some(x);
        }
        if gx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let dg = a + c * m * x.powf(m - 1.0);
        let mut next = x - gx / dg;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.max(f64::MIN_POSITIVE) || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Some(next);
        }
        x = next;
    }
    None
}

/// `E_alpha(z)` for `alpha in (0, 1]` and real `z <= 0`.
pub fn mittag_leffler(alpha: f64, z: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    if !(z <= 0.0) || !z.is_finite() {
        return domain(format!("argument must be finite and nonpositive, got {z}"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if alpha == 1.0 {
        return Ok(z.exp());
    }
    let x = -z;
    if x <= 1.0 {
        return Ok(ml_series(alpha, x));
    }
    if x >= 10.0 {
        if let Some(v) = ml_asymptotic(alpha, x) {
            return Ok(v);
        }
    }
    Ok(ml_integral(alpha, x))
}

fn ml_series(alpha: f64, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = 1.0;
    for k in 0..400 {
        let term = pow * rgamma(alpha * k as f64 + 1.0);
        sum += term;
        if k > 2 && term.abs() < 1e-17 {
            break;
        }
        pow *= -x;
    }
    sum
}

// -sum_{k>=1} z^{-k} / Gamma(1 - alpha k), truncated before the smallest
// term; rejected unless that term is negligible.
fn ml_asymptotic(alpha: f64, x: f64) -> Option<f64> {
    let lx = x.ln();
    let mut sum = 0.0f64;
    let mut prev_bound = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        // |1/Gamma(1 - a k)| <= Gamma(a k) / pi
        let bound = (ln_gamma(alpha * kf) - kf * lx).exp() / PI;
        if bound > prev_bound {
            return (prev_bound <= 1e-15 * sum.abs()).then_some(sum);
        }
        prev_bound = bound;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum -= sign * (-kf * lx).exp() * rgamma(1.0 - alpha * kf);
        if bound < 1e-18 * sum.abs() {
            return Some(sum);
        }
    }
    None
}

fn ml_integral(alpha: f64, x: f64) -> f64 {
    let c = (alpha * PI).cos();
    let p = 1.0 / alpha;
    let denom = |s: f64| s * s + 2.0 * s * c + 1.0;
    // exp(-s^p) is below 1e-17 for s > 40^alpha
    let reach = 40f64.powf(alpha);
    // sigma in (0, 1), rescaled to s = sigma x so the decay has unit width
    let top = x.min(reach);
    let near_fn = |s: f64| (-s.powf(p)).exp() / denom(s / x);
    let near = if top > 1.0 {
        integrate(near_fn, 0.0, 1.0, 1e-16) + integrate(near_fn, 1.0, top, 1e-16)
    } else {
        integrate(near_fn, 0.0, top, 1e-16)
    } / x;
    // 1/sigma in (0, 1); negligible unless w > x / reach
    let start = x / reach;
    let far = if start < 1.0 {
        integrate(|w| (-(x / w).powf(p)).exp() / denom(w), start, 1.0, 1e-17)
    } else {
        0.0
    };
    (alpha * PI).sin() / (alpha * PI) * (near + far)
}

/// Two-sided decay constants and tail slope of a positive sample sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeReport {
    /// `min_j v_j (1 + t_j^{alpha/m})`.
    pub c1: f64,
    /// `max_j v_j (1 + t_j^{alpha/m})`.
    pub c2: f64,
    /// Least-squares slope of `ln v` against `ln t` on the window.
    pub tail_slope: f64,
    pub expected_slope: f64,
    pub window: (f64, f64),
    pub pass: bool,
}

/// Envelope check with the window set to the last decade `[T/10, T]`.
pub fn envelope_check(v: &SampledFunction, alpha: f64, m: f64) -> Result<EnvelopeReport> {
    let t_end = v.grid().horizon();
    envelope_check_window(v, alpha, m, (0.1 * t_end, t_end))
}

/// Envelope check with the slope fitted on `window`; the slope must be
/// within 10% of `-alpha/m`.
pub fn envelope_check_window(v: &SampledFunction, alpha: f64, m: f64, window: (f64, f64)) -> Result<EnvelopeReport> {
    if !(alpha > 0.0 && alpha < 1.0 && m > 0.0) {
        return domain(format!("invalid exponents alpha = {alpha}, m = {m}"));
    }
    if let Some(i) = v.values().iter().position(|&x| !(x > 0.0)) {
        return domain(format!(
            "envelope needs positive samples, v_{} = {}",
            i + 1,
            v.values()[i]
        ));
    }
    let g = v.grid();
    let e = alpha / m;
    let mut c1 = f64::INFINITY;
    let mut c2: f64 = 0.0;
    let mut pts = Vec::new();
    for (j, &x) in v.values().iter().enumerate() {
        let t = g.t(j + 1);
        let s = x * (1.0 + t.powf(e));
        c1 = c1.min(s);
        c2 = c2.max(s);
        if t >= window.0 && t <= window.1 {
            pts.push((t.ln(), x.ln()));
        }
    }
    if let Some(v0) = v.initial() {
        c1 = c1.min(v0);
        c2 = c2.max(v0);
    }
    if pts.len() < 2 {
        return domain(format!(
            "window [{}, {}] holds fewer than two samples",
            window.0, window.1
        ));
    }
    let tail_slope = ls_slope(&pts);
    let expected_slope = -e;
    let pass = c1 > 0.0 && c1 <= c2 && c2.is_finite() && (tail_slope - expected_slope).abs() <= 0.1 * e;
    Ok(EnvelopeReport {
        c1,
        c2,
        tail_slope,
        expected_slope,
        window,
        pass,
    })
}

pub(crate) fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Outcome of comparing a weighted-mass series against the lower ODE.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparatorReport {
    /// Solution of `d/dt(g_alpha * [Z - U0]) = -C Z^m` on the grid of `U`.
    pub z: SampledFunction,
    /// `C = 2N (int G)^{1-m}`.
    pub constant: f64,
    /// `min_j U_j / Z_j`.
    pub min_ratio: f64,
    pub pass: bool,
}

/// Relative slack allowed in `U_j >= Z_j`.
pub const COMPARISON_SLACK: f64 = 1e-3;

/// Solves the comparison ODE with `C = 2N (int G)^{1-m}` and checks
/// `U_j >= Z_j (1 - 1e-3)` at every node.
pub fn nonextinction_comparator(
    u: &SampledFunction,
    u0: f64,
    alpha: f64,
    m: f64,
    dim: usize,
    gaussian_mass: f64,
) -> Result<ComparatorReport> {
    if !(u0 > 0.0) {
        return domain(format!("initial weighted mass must be positive, got {u0}"));
    }
    if !(m > 0.0 && m < 1.0) {
        return domain(format!("comparison needs 0 < m < 1, got {m}"));
    }
    if !(gaussian_mass > 0.0) || dim == 0 {
        return domain("Gaussian mass and dimension must be positive");
    }
    let constant = 2.0 * dim as f64 * gaussian_mass.powf(1.0 - m);
    let problem = OdeProblem {
        alpha,
        lambda: constant,
        m,
        v0: u0,
        tgrid: *u.grid(),
    };
    let z = solve_power_ode(&problem)?;
    let mut min_ratio = f64::INFINITY;
    let mut pass = true;
    for (&uj, &zj) in u.values().iter().zip(z.values()) {
        min_ratio = min_ratio.min(uj / zj);
        if uj < zj * (1.0 - COMPARISON_SLACK) {
            pass = false;
        }
    }
    Ok(ComparatorReport {
        z,
        constant,
        min_ratio,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::erf::erfc;

    fn problem(alpha: f64, lambda: f64, m: f64, v0: f64, tau: f64, t: f64) -> OdeProblem {
        OdeProblem {
            alpha,
            lambda,
            m,
            v0,
            tgrid: TimeGrid::with_horizon(tau, t).unwrap(),
        }
    }

    #[test]
    fn mittag_leffler_special_values() {
        assert_eq!(mittag_leffler(0.3, 0.0).unwrap(), 1.0);
        assert!((mittag_leffler(1.0, -1.0).unwrap() - 0.367_879_4).abs() < 1e-7);
        let e = mittag_leffler(0.5, -1.0).unwrap();
        assert!((e - 0.427_583_6).abs() < 1e-7);
        assert!(mittag_leffler(0.0, -1.0).is_err());
        assert!(mittag_leffler(1.2, -1.0).is_err());
        assert!(mittag_leffler(0.5, 0.5).is_err());
    }

    #[test]
    fn half_order_matches_erfc_identity() {
        for i in 1..=60 {
            let x = 0.1 * i as f64;
            let exact = (x * x).exp() * erfc(x);
            let got = mittag_leffler(0.5, -x).unwrap();
            assert!((got - exact).abs() <= 1e-9 * exact, "x {x}: {got} vs {exact}");
        }
    }

    #[test]
    fn matches_high_precision_reference() {
        // 30-digit quadrature of the integral representation
        let cases = [
            (0.25, 1e4, 8.159_925_228_980_648e-5),
            (0.5, 3.0, 0.179_001_151_181_389_95),
            (0.75, 12.0, 0.025_085_777_706_384_878),
            (0.9, 200.0, 5.299_754_388_832_091e-4),
        ];
        for (alpha, x, exact) in cases {
            let got = mittag_leffler(alpha, -x).unwrap();
            assert!((got - exact).abs() <= 1e-11 * exact, "a {alpha} x {x}: {got}");
        }
    }

    #[test]
    fn asymptotic_branch_matches_integral() {
        for &alpha in &[0.25, 0.5, 0.75, 0.9] {
            for &x in &[12.0, 30.0, 200.0, 1e4] {
                let direct = ml_integral(alpha, x);
                let got = mittag_leffler(alpha, -x).unwrap();
                assert!(
                    (got - direct).abs() <= 1e-10 * direct.abs().max(1e-300),
                    "a {alpha} x {x}"
                );
            }
        }
    }

    #[test]
    fn mittag_leffler_is_completely_monotone_on_samples() {
        for &alpha in &[0.2, 0.5, 0.8, 0.95] {
            let mut prev = 1.0;
            for i in 1..400 {
                let x = 0.05 * i as f64 * (1.0 + i as f64 / 40.0);
                let v = mittag_leffler(alpha, -x).unwrap();
                assert!(v > 0.0 && v <= prev + 1e-14, "alpha {alpha} x {x}");
                prev = v;
            }
        }
    }

    #[test]
    fn linear_ode_matches_mittag_leffler() {
        let v = solve_power_ode(&problem(0.5, 1.0, 1.0, 1.0, 1e-3, 1.0)).unwrap();
        assert!((v.last() - 0.427_583_6).abs() < 1e-2);
    }

    #[test]
    fn zero_rate_keeps_data() {
        let v = solve_power_ode(&problem(0.5, 0.0, 0.5, 2.0, 1e-2, 1.0)).unwrap();
        assert!(v.values().iter().all(|&x| (x - 2.0).abs() < 1e-14));
        let env = envelope_check(&v, 0.5, 0.5).unwrap();
        assert!(!env.pass);
        assert!(env.tail_slope.abs() < 1e-10);
    }

    #[test]
    fn solutions_are_positive_nonincreasing_and_ordered() {
        for &alpha in &[0.25, 0.5, 0.75] {
            for &m in &[0.5, 1.0, 2.0] {
                let a = solve_power_ode(&problem(alpha, 2.0, m, 1.0, 0.01, 5.0)).unwrap();
                let b = solve_power_ode(&problem(alpha, 2.0, m, 1.5, 0.01, 5.0)).unwrap();
                let mut prev = 1.0;
                for (&x, &y) in a.values().iter().zip(b.values()) {
                    assert!(x > 0.0 && x <= prev);
                    assert!(x <= y);
                    prev = x;
                }
                let env = envelope_check(&a, alpha, m).unwrap();
                assert!(env.c1 > 0.0 && env.c1 <= env.c2 && env.c2.is_finite());
            }
        }
    }

    #[test]
    fn tail_slope_for_linear_decay() {
        let v = solve_power_ode(&problem(0.5, 1.0, 1.0, 1.0, 1.0, 1e4)).unwrap();
        let env = envelope_check(&v, 0.5, 1.0).unwrap();
        assert!((env.tail_slope + 0.5).abs() < 0.05, "slope {}", env.tail_slope);
        assert!(env.pass);
    }

    #[test]
    fn envelope_rejects_nonpositive_samples() {
        let g = TimeGrid::new(1.0, 3).unwrap();
        let v = SampledFunction::new(g, vec![1.0, 0.0, 0.5], Some(1.0)).unwrap();
        assert!(envelope_check(&v, 0.5, 0.5).is_err());
    }

    #[test]
    fn comparator_cases() {
        let g = TimeGrid::with_horizon(0.05, 20.0).unwrap();
        let flat = SampledFunction::from_fn(g, |_| 1.0);
        let r = nonextinction_comparator(&flat, 1.0, 0.5, 0.5, 1, 1.77).unwrap();
        assert!(r.pass);
        assert!((r.constant - 2.0 * 1.77f64.sqrt()).abs() < 1e-12);
        let decayed = SampledFunction::from_fn(g, |t| (-t).exp());
        assert!(!nonextinction_comparator(&decayed, 1.0, 0.5, 0.5, 1, 1.77).unwrap().pass);
        assert!(nonextinction_comparator(&flat, 0.0, 0.5, 0.5, 1, 1.77).is_err());
        assert!(nonextinction_comparator(&flat, 1.0, 0.5, 1.5, 1, 1.77).is_err());
    }

    #[test]
    fn scalar_root_brackets() {
        let r = scalar_root(2.0, 3.0, 0.5, 1.0).unwrap();
        assert!((2.0 * r + 3.0 * r.sqrt() - 1.0).abs() < 1e-14);
        assert_eq!(scalar_root(2.0, 3.0, 0.5, 0.0), Some(0.0));
    }
}

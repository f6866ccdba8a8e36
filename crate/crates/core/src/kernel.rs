//! Discrete convolution kernels on a uniform time grid.
//!
//! A kernel `k` is represented by its exact cell integrals
//! `b_p = \int_{p tau}^{(p+1) tau} k(s) ds`, and a time function by its
//! right-endpoint samples. With that pairing the convolution
//! `(k * v)(t_j)` becomes the product-integration sum
//! `sum_{i=1}^{j} b_{j-i} v_i`, which is exact whenever `v` is piecewise
//! constant on the cells and keeps the weakly singular part of `k` inside
//! the analytically integrated weights.

use crate::error::{domain, Error, Result};
use crate::special::gamma;

/// Uniform time grid `t_j = j tau`, `j = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    tau: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(tau: f64, steps: usize) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return domain(format!("time step must be positive, got {tau}"));
        }
        if steps == 0 {
            return domain("time grid needs at least one step");
        }
        Ok(Self { tau, steps })
    }

    /// Grid covering `[0, horizon]` with step `tau`; the step count is
    /// rounded to the nearest integer.
    pub fn with_horizon(tau: f64, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return domain(format!("time horizon must be positive, got {horizon}"));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return domain(format!("time step must be positive, got {tau}"));
        }
        Self::new(tau, (horizon / tau).round().max(1.0) as usize)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn t(&self, j: usize) -> f64 {
        j as f64 * self.tau
    }

    pub fn horizon(&self) -> f64 {
        self.t(self.steps)
    }

    /// The grid with half the step covering the same horizon.
    pub fn refined(&self) -> Self {
        Self {
            tau: 0.5 * self.tau,
            steps: 2 * self.steps,
        }
    }
}

/// Which construction produced a set of kernel weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    RiemannLiouville { alpha: f64 },
    SonineComplement { alpha: f64 },
    Numeric,
    Relaxation { n: u32 },
    Resolvent { n: u32 },
    Yosida { n: u32 },
}

/// Cell integrals `b_0..b_{J-1}` of a nonnegative nonincreasing kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelWeights {
    grid: TimeGrid,
    b: Vec<f64>,
    kind: KernelKind,
}

impl KernelWeights {
    /// Validates positivity and monotonicity of the weights. A relative
    /// slack of a few ulps absorbs roundoff from deconvolution.
    pub fn new(grid: TimeGrid, b: Vec<f64>, kind: KernelKind) -> Result<Self> {
        if b.len() != grid.steps() {
            return Err(Error::Shape(format!(
                "{} weights for a grid with {} steps",
                b.len(),
                grid.steps()
            )));
        }
        for (p, &w) in b.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeights(format!(
                    "b[{p}] = {w} is not a nonnegative number"
                )));
            }
        }
        for p in 1..b.len() {
            if b[p] > b[p - 1] * (1.0 + 64.0 * f64::EPSILON) {
                return Err(Error::InvalidWeights(format!(
                    "weights increase at p = {p}: {} > {}",
                    b[p],
                    b[p - 1]
                )));
            }
        }
        Ok(Self { grid, b, kind })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.b
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    /// Cell averages `b_{i-1} / tau` as a sampled function on cells `1..=J`.
    pub fn cell_averages(&self) -> SampledFunction {
        let tau = self.grid.tau();
        SampledFunction {
            grid: self.grid,
            values: self.b.iter().map(|w| w / tau).collect(),
            initial: None,
        }
    }

    /// Weights of the kernel sum `self + other`.
    pub fn sum(&self, other: &KernelWeights) -> Result<KernelWeights> {
        check_grids(&self.grid, &other.grid)?;
        let b = self.b.iter().zip(&other.b).map(|(a, c)| a + c).collect();
        KernelWeights::new(self.grid, b, KernelKind::Numeric)
    }

    /// Discrete `L^1(0, T)` distance between the piecewise-constant kernels.
    pub fn l1_distance(&self, other: &KernelWeights) -> Result<f64> {
        check_grids(&self.grid, &other.grid)?;
        Ok(self.b.iter().zip(&other.b).map(|(a, c)| (a - c).abs()).sum())
    }
}

/// Samples `v_1..v_J` at the right endpoints of the cells, plus an optional
/// value at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: TimeGrid,
    values: Vec<f64>,
    initial: Option<f64>,
}

impl SampledFunction {
    pub fn new(grid: TimeGrid, values: Vec<f64>, initial: Option<f64>) -> Result<Self> {
        if values.len() != grid.steps() {
            return Err(Error::Shape(format!(
                "{} samples for a grid with {} steps",
                values.len(),
                grid.steps()
            )));
        }
        Ok(Self { grid, values, initial })
    }

    /// Samples `f(t_j)` for `j = 1..=J`, with `f(0)` stored when finite.
    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = (1..=grid.steps()).map(|j| f(grid.t(j))).collect();
        let f0 = f(0.0);
        Self {
            grid,
            values,
            initial: f0.is_finite().then_some(f0),
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Values at `t_1..t_J`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn initial(&self) -> Option<f64> {
        self.initial
    }

    /// Value at `t_J`.
    pub fn last(&self) -> f64 {
        *self.values.last().expect("grid has at least one step")
    }

    /// Value at node `j`, where `j = 0` needs a stored initial value.
    pub fn at(&self, j: usize) -> Option<f64> {
        if j == 0 {
            self.initial
        } else {
            self.values.get(j - 1).copied()
        }
    }

    /// Cell weights of the sampled kernel: cell averages of the linear
    /// interpolant when `v(0)` is known, right-endpoint values otherwise.
    pub fn to_weights(&self, kind: KernelKind) -> Result<KernelWeights> {
        let tau = self.grid.tau();
        let b = match self.initial {
            Some(v0) => (0..self.values.len())
                .map(|p| {
                    let left = if p == 0 { v0 } else { self.values[p - 1] };
                    0.5 * tau * (left + self.values[p])
                })
                .collect(),
            None => self.values.iter().map(|v| tau * v).collect(),
        };
        KernelWeights::new(self.grid, b, kind)
    }
}

fn check_grids(a: &TimeGrid, b: &TimeGrid) -> Result<()> {
    if a != b {
        return Err(Error::Shape(format!(
            "time grids differ: (tau {}, {} steps) vs (tau {}, {} steps)",
            a.tau(),
            a.steps(),
            b.tau(),
            b.steps()
        )));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("exponent must lie in (0, 1), got {alpha}"));
    }
    Ok(())
}

fn check_index(n: u32) -> Result<()> {
    if n < 1 {
        return domain("Yosida index must be at least 1");
    }
    Ok(())
}

/// Exact cell integrals of `t^{-alpha} / Gamma(1 - alpha)`.
pub fn rl_weights(alpha: f64, grid: TimeGrid) -> Result<KernelWeights> {
    check_alpha(alpha)?;
    let e = 1.0 - alpha;
    let scale = grid.tau().powf(e) / gamma(2.0 - alpha);
    let b = (0..grid.steps())
        .map(|p| {
            let p = p as f64;
            ((p + 1.0).powf(e) - p.powf(e)) * scale
        })
        .collect();
    KernelWeights::new(grid, b, KernelKind::RiemannLiouville { alpha })
}

/// The Sonine partner `g_{1-alpha}` of `g_alpha`.
pub fn sonine_complement(alpha: f64, grid: TimeGrid) -> Result<KernelWeights> {
    check_alpha(alpha)?;
    let mut w = rl_weights(1.0 - alpha, grid)?;
    w.kind = KernelKind::SonineComplement { alpha };
    Ok(w)
}

/// Product-integration convolution `out_j = sum_{i=1}^{j} b_{j-i} v_i`.
pub fn discrete_convolve(b: &KernelWeights, v: &SampledFunction) -> Result<SampledFunction> {
    check_grids(&b.grid, &v.grid)?;
    let w = &b.b;
    let out = (1..=v.values.len())
        .map(|j| (1..=j).map(|i| w[j - i] * v.values[i - 1]).sum())
        .collect();
    Ok(SampledFunction {
        grid: v.grid,
        values: out,
        initial: Some(0.0),
    })
}

/// Discrete `d/dt (k * [u - u0])` in difference form,
/// `D_j = (1/tau) sum_{i=1}^{j} b_{j-i} (u_i - u_{i-1})` with `u_0 = u0`.
pub fn nonlocal_derivative(b: &KernelWeights, u: &SampledFunction, u0: f64) -> Result<SampledFunction> {
    check_grids(&b.grid, &u.grid)?;
    let w = &b.b;
    let tau = b.grid.tau();
    let prev = |i: usize| if i == 1 { u0 } else { u.values[i - 2] };
    let out = (1..=u.values.len())
        .map(|j| (1..=j).map(|i| w[j - i] * (u.values[i - 1] - prev(i))).sum::<f64>() / tau)
        .collect();
    Ok(SampledFunction {
        grid: u.grid,
        values: out,
        initial: None,
    })
}

/// The same operator obtained by differencing the convolution
/// `(k * [u - u0])` between consecutive nodes.
pub fn nonlocal_derivative_by_differencing(b: &KernelWeights, u: &SampledFunction, u0: f64) -> Result<SampledFunction> {
    let shifted = SampledFunction::new(u.grid, u.values.iter().map(|v| v - u0).collect(), None)?;
    let conv = discrete_convolve(b, &shifted)?;
    let tau = b.grid.tau();
    let mut prev = 0.0;
    let out = conv
        .values
        .iter()
        .map(|&c| {
            let d = (c - prev) / tau;
            prev = c;
            d
        })
        .collect();
    Ok(SampledFunction {
        grid: u.grid,
        values: out,
        initial: None,
    })
}

/// Nodal Sonine residual `r_j = (k * l)(t_j) - 1`, with `l` taken as its
/// cell averages.
pub fn sonine_residual(k: &KernelWeights, ell: &KernelWeights) -> Result<Vec<f64>> {
    let conv = discrete_convolve(k, &ell.cell_averages())?;
    Ok(conv.values.iter().map(|c| c - 1.0).collect())
}

/// Largest absolute entry of [`sonine_residual`].
pub fn max_sonine_residual(k: &KernelWeights, ell: &KernelWeights) -> Result<f64> {
    Ok(sonine_residual(k, ell)?.iter().fold(0.0, |m, r| m.max(r.abs())))
}

/// Solves `s + n (s * l) = 1` by forward substitution. `s(0) = 1` is stored
/// as the initial value.
pub fn volterra_relaxation(ell: &KernelWeights, n: u32) -> Result<SampledFunction> {
    check_index(n)?;
    let nf = f64::from(n);
    let w = &ell.b;
    let diag = 1.0 + nf * w[0];
    let mut s: Vec<f64> = Vec::with_capacity(w.len());
    for j in 1..=w.len() {
        let hist: f64 = (1..j).map(|i| w[j - i] * s[i - 1]).sum();
        s.push((1.0 - nf * hist) / diag);
    }
    Ok(SampledFunction {
        grid: ell.grid,
        values: s,
        initial: Some(1.0),
    })
}

/// Solves `h + n (h * l) = n l` by forward substitution, with `l` on the
/// right-hand side taken as its cell averages.
pub fn resolvent_kernel(ell: &KernelWeights, n: u32) -> Result<SampledFunction> {
    check_index(n)?;
    let nf = f64::from(n);
    let w = &ell.b;
    let tau = ell.grid.tau();
    let diag = 1.0 + nf * w[0];
    let mut h: Vec<f64> = Vec::with_capacity(w.len());
    for j in 1..=w.len() {
        let hist: f64 = (1..j).map(|i| w[j - i] * h[i - 1]).sum();
        h.push((nf * w[j - 1] / tau - nf * hist) / diag);
    }
    Ok(SampledFunction {
        grid: ell.grid,
        values: h,
        initial: None,
    })
}

/// Residual above which a kernel pair is not treated as a discrete Sonine pair.
pub const PAIR_TOLERANCE: f64 = 1e-8;

/// Weights of the Yosida kernel `k_n = n s_n`.
pub fn yosida_kernel(k: &KernelWeights, ell: &KernelWeights, n: u32) -> Result<KernelWeights> {
    check_index(n)?;
    check_grids(&k.grid, &ell.grid)?;
    let residual = max_sonine_residual(k, ell)?;
    if residual > PAIR_TOLERANCE {
        return Err(Error::InconsistentPair {
            residual,
            threshold: PAIR_TOLERANCE,
        });
    }
    let s = volterra_relaxation(ell, n)?;
    let nf = f64::from(n);
    let scaled = SampledFunction {
        grid: s.grid,
        values: s.values.iter().map(|v| nf * v).collect(),
        initial: s.initial.map(|v| nf * v),
    };
    scaled.to_weights(KernelKind::Yosida { n })
}

/// Discrete complement `l` of `k`, defined by `(k * l)(t_j) = 1` at every
/// node, found by forward substitution.
pub fn numeric_complement(k: &KernelWeights) -> Result<KernelWeights> {
    let w = &k.b;
    if !(w[0] > 0.0) {
        return Err(Error::SingularDeconvolution(w[0]));
    }
    let tau = k.grid.tau();
    let mut ell: Vec<f64> = Vec::with_capacity(w.len());
    for j in 0..w.len() {
        let hist: f64 = (0..j).map(|i| w[j - i] * ell[i]).sum();
        ell.push((tau - hist) / w[0]);
    }
    KernelWeights::new(k.grid, ell, KernelKind::Numeric)
}

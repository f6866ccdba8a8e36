//! Odd, strictly increasing nonlinearities `Phi` with `Phi(0) = 0`.
//!
//! Besides the power law `|r|^{m-1} r`, this module provides the two-stage
//! regularization used to build solutions: the law is first continued
//! linearly beyond a cap `M`, then desingularized near the origin by a
//! linear piece of slope `Phi'(1/n)` glued in through an argument shift.
//! The result is `C^1` with derivative pinned between two positive bounds.

use crate::error::{domain, Error, Result};

/// `Phi(r) = |r|^{m-1} r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    m: f64,
}

impl PowerLaw {
    pub fn exponent(&self) -> f64 {
        self.m
    }

    fn value_pos(&self, r: f64) -> f64 {
        if self.m == 1.0 {
            r
        } else {
            r.powf(self.m)
        }
    }

    fn derivative_pos(&self, r: f64) -> f64 {
        if self.m == 1.0 {
            return 1.0;
        }
        if r == 0.0 {
            return if self.m < 1.0 { f64::INFINITY } else { 0.0 };
        }
        self.m * r.powf(self.m - 1.0)
    }

    fn inverse_pos(&self, y: f64) -> f64 {
        if self.m == 1.0 {
            y
        } else {
            y.powf(1.0 / self.m)
        }
    }
}

/// Capped and desingularized version of a power law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularized {
    base: PowerLaw,
    cap: f64,
    index: u32,
    shift: f64,
    // cached knot data
    inv_n: f64,
    slope_origin: f64,
    slope_cap: f64,
    value_cap: f64,
}

impl Regularized {
    pub fn base(&self) -> PowerLaw {
        self.base
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    /// Half-width `alpha_n = Phi(1/n) / Phi'(1/n)` of the linear core.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    // capped law, r >= 0
    fn capped(&self, r: f64) -> f64 {
        if r > self.cap {
            self.slope_cap * (r - self.cap) + self.value_cap
        } else {
            self.base.value_pos(r)
        }
    }

    fn capped_derivative(&self, r: f64) -> f64 {
        if r > self.cap {
            self.slope_cap
        } else {
            self.base.derivative_pos(r)
        }
    }

    fn capped_inverse(&self, y: f64) -> f64 {
        if y > self.value_cap {
            self.cap + (y - self.value_cap) / self.slope_cap
        } else {
            self.base.inverse_pos(y)
        }
    }

    fn value_pos(&self, r: f64) -> f64 {
        if r > self.shift {
            self.capped(r + self.inv_n - self.shift)
        } else {
            self.slope_origin * r
        }
    }

    fn derivative_pos(&self, r: f64) -> f64 {
        if r > self.shift {
            self.capped_derivative(r + self.inv_n - self.shift)
        } else {
            self.slope_origin
        }
    }

    fn inverse_pos(&self, y: f64) -> f64 {
        // knot value Phi(1/n) = slope_origin * shift
        if y > self.slope_origin * self.shift {
            self.capped_inverse(y) - self.inv_n + self.shift
        } else {
            y / self.slope_origin
        }
    }
}

/// An evaluatable nonlinearity with derivative and inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nonlinearity {
    PowerLaw(PowerLaw),
    Regularized(Regularized),
}

/// `Phi(r) = |r|^{m-1} r` for `m > 0`.
pub fn power_law(m: f64) -> Result<Nonlinearity> {
    if !(m.is_finite() && m > 0.0) {
        return domain(format!("power-law exponent must be positive, got {m}"));
    }
    Ok(Nonlinearity::PowerLaw(PowerLaw { m }))
}

/// Builds the capped, desingularized law `Phi~_n` from a power law.
///
/// The cap should exceed every value the solution can take, typically
/// `||u0||_inf + 1`, and `1/n` must stay below it.
pub fn regularize(phi: &Nonlinearity, cap: f64, n: u32) -> Result<Nonlinearity> {
    let base = match phi {
        Nonlinearity::PowerLaw(p) => *p,
        Nonlinearity::Regularized(_) => return Err(Error::Config("nonlinearity is already regularized".into())),
    };
    if !(cap.is_finite() && cap > 0.0) {
        return domain(format!("cap must be positive, got {cap}"));
    }
    if n < 1 {
        return domain("regularization index must be at least 1");
    }
    let inv_n = 1.0 / f64::from(n);
    if inv_n >= cap {
        return domain(format!("1/n = {inv_n} must lie below the cap {cap}"));
    }
    let slope_origin = base.derivative_pos(inv_n);
    let shift = base.value_pos(inv_n) / slope_origin;
    Ok(Nonlinearity::Regularized(Regularized {
        base,
        cap,
        index: n,
        shift,
        inv_n,
        slope_origin,
        slope_cap: base.derivative_pos(cap),
        value_cap: base.value_pos(cap),
    }))
}

impl Nonlinearity {
    pub fn value(&self, r: f64) -> f64 {
        let a = r.abs();
        let v = match self {
            Nonlinearity::PowerLaw(p) => p.value_pos(a),
            Nonlinearity::Regularized(g) => g.value_pos(a),
        };
        if r < 0.0 {
            -v
        } else {
            v
        }
    }

    /// `Phi'(r)`. For a bare power law the derivative at the origin is
    /// `+inf` when `m < 1` and `0` when `m > 1`.
    pub fn derivative(&self, r: f64) -> f64 {
        let a = r.abs();
        match self {
            Nonlinearity::PowerLaw(p) => p.derivative_pos(a),
            Nonlinearity::Regularized(g) => g.derivative_pos(a),
        }
    }

    pub fn inverse(&self, y: f64) -> f64 {
        let a = y.abs();
        let v = match self {
            Nonlinearity::PowerLaw(p) => p.inverse_pos(a),
            Nonlinearity::Regularized(g) => g.inverse_pos(a),
        };
        if y < 0.0 {
            -v
        } else {
            v
        }
    }

    /// `(Phi^{-1})'(y)`.
    pub fn inverse_derivative(&self, y: f64) -> f64 {
        1.0 / self.derivative(self.inverse(y))
    }

    /// Exponent of the underlying power law.
    pub fn exponent(&self) -> f64 {
        match self {
            Nonlinearity::PowerLaw(p) => p.m,
            Nonlinearity::Regularized(g) => g.base.m,
        }
    }

    /// Bounds `c1 <= Phi' <= c2` on the whole line, when they exist with
    /// `c1 > 0` and `c2 < inf`.
    pub fn derivative_bounds(&self) -> Option<(f64, f64)> {
        match self {
            Nonlinearity::PowerLaw(p) if p.m == 1.0 => Some((1.0, 1.0)),
            Nonlinearity::PowerLaw(_) => None,
            Nonlinearity::Regularized(g) => {
                let a = g.slope_origin;
                let b = g.slope_cap;
                Some((a.min(b), a.max(b)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn power_law_values() {
        let p2 = power_law(2.0).unwrap();
        assert_eq!(p2.value(-3.0), -9.0);
        assert_eq!(p2.inverse(-9.0), -3.0);
        let ph = power_law(0.5).unwrap();
        assert_eq!(ph.value(4.0), 2.0);
        assert_eq!(power_law(1.0).unwrap().value(-1.25), -1.25);
    }

    #[test]
    fn power_law_rejects_nonpositive_exponent() {
        assert!(power_law(0.0).is_err());
        assert!(power_law(-1.0).is_err());
        assert!(power_law(f64::NAN).is_err());
    }

    #[test]
    fn derivative_sentinel_at_origin() {
        assert_eq!(power_law(0.5).unwrap().derivative(0.0), f64::INFINITY);
        assert_eq!(power_law(2.0).unwrap().derivative(0.0), 0.0);
        assert_eq!(power_law(1.0).unwrap().derivative(0.0), 1.0);
        assert!(power_law(0.5).unwrap().derivative_bounds().is_none());
        assert!(power_law(2.0).unwrap().derivative_bounds().is_none());
    }

    #[test]
    fn shift_for_power_law() {
        for &m in &[0.3, 0.5, 1.0, 2.0, 3.0] {
            for &n in &[1u32, 4, 50] {
                let r = regularize(&power_law(m).unwrap(), 5.0, n).unwrap();
                let Nonlinearity::Regularized(g) = r else {
                    unreachable!()
                };
                let expected = 1.0 / (m * f64::from(n));
                assert!((g.shift() - expected).abs() < 1e-14 * expected.max(1.0));
            }
        }
    }

    #[test]
    fn knots_are_continuous() {
        let phi = power_law(0.5).unwrap();
        let r = regularize(&phi, 2.0, 4).unwrap();
        let Nonlinearity::Regularized(g) = r else {
            unreachable!()
        };
        let a = g.shift();
        // both branches at r = alpha_n give Phi(1/n)
        assert!((g.slope_origin * a - phi.value(0.25)).abs() < 1e-15);
        assert!((g.capped(a + 0.25 - a) - phi.value(0.25)).abs() < 1e-15);
        let eps = 1e-9;
        assert!((r.value(a + eps) - r.value(a - eps)).abs() < 1e-8);
        assert!((r.derivative(a + eps) - r.derivative(a - eps)).abs() < 1e-7);
        // cap knot in the shifted argument
        let knot = 2.0 - 0.25 + a;
        assert!((r.value(knot + eps) - r.value(knot - eps)).abs() < 1e-8);
        assert!((r.derivative(knot + eps) - r.derivative(knot - eps)).abs() < 1e-7);
    }

    #[test]
    fn derivative_bounds_example() {
        let r = regularize(&power_law(0.5).unwrap(), 2.0, 4).unwrap();
        let (c1, c2) = r.derivative_bounds().unwrap();
        assert!((c1 - 0.5 * 2f64.powf(-0.5)).abs() < 1e-14);
        assert!((c2 - 1.0).abs() < 1e-14);
        assert!((c1 - 0.3536).abs() < 1e-4);
    }

    #[test]
    fn derivative_bounds_hold_on_dense_sample() {
        for &(m, cap, n) in &[(0.5, 2.0, 4u32), (2.0, 3.0, 10), (0.3, 1.5, 64), (1.0, 1.0, 2)] {
            let r = regularize(&power_law(m).unwrap(), cap, n).unwrap();
            let (c1, c2) = r.derivative_bounds().unwrap();
            for i in 0..100_000 {
                let x = -3.0 * cap + 6.0 * cap * (i as f64) / 99_999.0;
                let d = r.derivative(x);
                assert!(d >= c1 * (1.0 - 1e-12) && d <= c2 * (1.0 + 1e-12), "m {m} x {x} d {d}");
            }
        }
    }

    #[test]
    fn regularization_converges_with_index() {
        let phi = power_law(0.5).unwrap();
        let cap = 3.0;
        let err = |n| {
            let r = regularize(&phi, cap, n).unwrap();
            (0..=600)
                .map(|i| -cap + 2.0 * cap * i as f64 / 600.0)
                .map(|x| (r.value(x) - phi.value(x)).abs())
                .fold(0.0f64, f64::max)
        };
        assert!(err(64) < err(4));
    }

    #[test]
    fn regularize_errors() {
        let phi = power_law(0.5).unwrap();
        assert!(regularize(&phi, 0.0, 3).is_err());
        assert!(regularize(&phi, 2.0, 0).is_err());
        let r = regularize(&phi, 2.0, 3).unwrap();
        assert!(regularize(&r, 2.0, 3).is_err());
    }

    fn all_laws() -> Vec<Nonlinearity> {
        let mut v = Vec::new();
        for &m in &[0.3, 0.5, 1.0, 2.0, 3.0] {
            let p = power_law(m).unwrap();
            v.push(p);
            v.push(regularize(&p, 4.0, 8).unwrap());
        }
        v
    }

    proptest! {
        #[test]
        fn odd_symmetry(r in -50.0f64..50.0) {
            for phi in all_laws() {
                prop_assert_eq!(phi.value(-r), -phi.value(r));
            }
        }

        #[test]
        fn strictly_increasing(a in -20.0f64..20.0, d in 1e-6f64..5.0) {
            for phi in all_laws() {
                prop_assert!(phi.value(a) < phi.value(a + d));
            }
        }

        #[test]
        fn inverse_round_trip(r in -10.0f64..10.0) {
            for phi in all_laws() {
                let back = phi.inverse(phi.value(r));
                prop_assert!((back - r).abs() <= 1e-12 * r.abs().max(1.0), "{:?} r {} back {}", phi, r, back);
            }
        }
    }
}

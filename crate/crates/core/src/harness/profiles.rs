//! Initial-data library and the truncation used to pass from the Cauchy
//! problem to bounded boxes.

use super::config::Profile;
use crate::error::{domain, Result};
use crate::spatial::{check_grid, plateau, Field, SpaceGrid, WeightField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shape parameters shared by all profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileParams {
    pub amplitude: f64,
    pub width: f64,
    pub seed: u64,
}

impl Default for ProfileParams {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            width: 1.0,
            seed: 0,
        }
    }
}

/// Samples a named profile on the interior nodes of `grid`.
pub fn profile(kind: Profile, grid: &SpaceGrid, p: ProfileParams) -> Field {
    let (a, w) = (p.amplitude, p.width);
    let r2 = |x: [f64; 2]| x[0] * x[0] + x[1] * x[1];
    match kind {
        Profile::Gaussian => Field::from_fn(*grid, |x| a * (-r2(x) / (w * w)).exp()),
        Profile::Bump => Field::from_fn(*grid, |x| a * (1.0 - r2(x) / (w * w)).max(0.0).powi(2)),
        Profile::Box => Field::from_fn(*grid, |x| a * plateau(r2(x).sqrt(), w, w + 0.5)),
        Profile::Sine => {
            let (lo, hi, dim) = (grid.lower(), grid.upper(), grid.dim());
            Field::from_fn(*grid, |x| {
                (0..dim)
                    .map(|k| (std::f64::consts::PI * (x[k] - lo[k]) / (hi[k] - lo[k])).sin())
                    .product::<f64>()
                    * a
            })
        }
        Profile::Random => random_field(grid, p, false),
        Profile::Zero => Field::zeros(*grid),
    }
}

/// Sum of a few Gaussian bumps with seeded centers, widths and amplitudes.
/// With `signed` the amplitudes take both signs.
pub fn random_field(grid: &SpaceGrid, p: ProfileParams, signed: bool) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let lo = grid.lower();
    let hi = grid.upper();
    let count = rng.random_range(2..=6);
    let bumps: Vec<([f64; 2], f64, f64)> = (0..count)
        .map(|_| {
            let mut c = [0.0; 2];
            for k in 0..grid.dim() {
                let mid = 0.5 * (lo[k] + hi[k]);
                let half = 0.25 * (hi[k] - lo[k]);
                c[k] = rng.random_range(mid - half..mid + half);
            }
            let width = p.width * rng.random_range(0.3..1.0);
            let amp = if signed {
                p.amplitude * rng.random_range(-1.0..1.0)
            } else {
                p.amplitude * rng.random_range(0.1..1.0)
            };
            (c, width, amp)
        })
        .collect();
    Field::from_fn(*grid, |x| {
        bumps
            .iter()
            .map(|(c, w, a)| {
                let d2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2);
                a * (-d2 / (w * w)).exp()
            })
            .sum()
    })
}

/// `u0^{n,m}`: clamp `u0` to `[-m, n]`, then multiply by the cutoff.
pub fn truncate_data(u0: &Field, n: f64, m: f64, psi: &WeightField) -> Result<Field> {
    if !(n >= 1.0 && m >= 1.0) {
        return domain(format!("truncation levels must be at least 1, got n = {n}, m = {m}"));
    }
    check_grid(u0.grid(), psi.field().grid())?;
    u0.zip_map(psi.field(), |u, p| u.clamp(-m, n) * p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spatial::{cutoff, lq_norm};
    use proptest::prelude::*;

    fn grid() -> SpaceGrid {
        SpaceGrid::centered(8.0, 0.1, 1).unwrap()
    }

    #[test]
    fn profiles_have_expected_shape() {
        let g = grid();
        let p = ProfileParams::default();
        let gauss = profile(Profile::Gaussian, &g, p);
        assert!((gauss.max_abs() - 1.0).abs() < 1e-12);
        assert!(profile(Profile::Bump, &g, p)
            .values()
            .iter()
            .all(|&v| (0.0..=1.0).contains(&v)));
        assert!(profile(Profile::Box, &g, p)
            .values()
            .iter()
            .all(|&v| (0.0..=1.0).contains(&v)));
        assert_eq!(profile(Profile::Zero, &g, p).max_abs(), 0.0);
        let s = profile(Profile::Sine, &g, p);
        assert!(s.values().iter().all(|&v| v > 0.0));
        let r = profile(Profile::Random, &g, p);
        assert!(r.values().iter().all(|&v| v >= 0.0));
        assert_eq!(r, profile(Profile::Random, &g, p));
        let other = profile(Profile::Random, &g, ProfileParams { seed: 1, ..p });
        assert_ne!(r, other);
    }

    #[test]
    fn truncation_examples() {
        let g = grid();
        let n = 3.0;
        let psi = cutoff(n, &g).unwrap();
        // data already inside [-m, n] and supported where psi = 1
        let u0 = Field::from_fn(g, |x| 0.5 * (1.0 - x[0] * x[0]).max(0.0));
        assert_eq!(truncate_data(&u0, n, 2.0, &psi).unwrap(), u0);
        // u0 = 2n gives n psi_n
        let big = Field::from_fn(g, |_| 2.0 * n);
        let t = truncate_data(&big, n, 2.0, &psi).unwrap();
        for (a, b) in t.values().iter().zip(psi.values()) {
            assert_eq!(*a, n * b);
        }
        assert!(truncate_data(&u0, 0.5, 2.0, &psi).is_err());
    }

    proptest! {
        #[test]
        fn truncation_bounds_and_monotonicity(seed in any::<u64>(), n in 1.0f64..4.0, m in 1.0f64..4.0) {
            let g = grid();
            let u0 = random_field(&g, ProfileParams { amplitude: 8.0, width: 1.5, seed }, true);
            let psi = cutoff(4.0, &g).unwrap();
            let t = truncate_data(&u0, n, m, &psi).unwrap();
            prop_assert!(t.max_abs() <= n.max(m));
            prop_assert!(lq_norm(&t, 1.0).unwrap() <= lq_norm(&u0, 1.0).unwrap());
            // fixed cutoff: increasing in n, decreasing in m
            let tn = truncate_data(&u0, n + 1.0, m, &psi).unwrap();
            let tm = truncate_data(&u0, n, m + 1.0, &psi).unwrap();
            for i in 0..g.len() {
                prop_assert!(tn.values()[i] >= t.values()[i]);
                prop_assert!(tm.values()[i] <= t.values()[i]);
            }
            // nonnegative data with the growing cutoff psi_n is increasing in n
            let pos = u0.map(f64::abs);
            let a = truncate_data(&pos, n, m, &cutoff(n, &g).unwrap()).unwrap();
            let b = truncate_data(&pos, n + 1.0, m, &cutoff(n + 1.0, &g).unwrap()).unwrap();
            for i in 0..g.len() {
                prop_assert!(b.values()[i] >= a.values()[i]);
            }
        }
    }
}

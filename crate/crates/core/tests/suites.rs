use tfdiff::harness::profiles::{random_field, truncate_data, ProfileParams};
use tfdiff::harness::suites::benchmark::sine_run;
use tfdiff::harness::suites::contraction::run_pair;
use tfdiff::harness::suites::mass::boundary_functional;
use tfdiff::harness::suites::{suite_contraction, ContractionParams};
use tfdiff::{cutoff, power_law, regularize, rl_weights, solve, Field, SolveConfig, SpaceGrid, TimeGrid};

fn config(m: f64, cap: f64) -> SolveConfig {
    let grid = SpaceGrid::centered(3.0, 0.1, 1).unwrap();
    let tgrid = TimeGrid::with_horizon(0.05, 1.0).unwrap();
    let phi = regularize(&power_law(m).unwrap(), cap, 500).unwrap();
    SolveConfig::new(rl_weights(0.5, tgrid).unwrap(), phi, grid).unwrap()
}

#[test]
fn ordered_pair_keeps_positive_part_zero() {
    let cfg = config(0.5, 6.0);
    let grid = *cfg.grid();
    let p = |seed| ProfileParams {
        amplitude: 2.0,
        width: 1.0,
        seed,
    };
    let u0 = random_field(&grid, p(1), true);
    let lift = random_field(&grid, p(2), false);
    let v0 = u0.zip_map(&lift, |a, b| a + b).unwrap();
    let o = run_pair(&cfg, &u0, &v0, &lift).unwrap();
    // [u - v]_+ starts at zero and must stay there
    assert!(o.positive_part <= 0.0, "{}", o.positive_part);
    assert!(o.order <= 1e-10);
    assert!(o.l1 <= 1e-8 && o.weighted <= 1e-6);
}

#[test]
fn identical_pair_has_no_differences() {
    let cfg = config(2.0, 4.0);
    let u0 = random_field(
        cfg.grid(),
        ProfileParams {
            amplitude: 1.0,
            width: 1.0,
            seed: 5,
        },
        true,
    );
    let o = run_pair(&cfg, &u0, &u0, &Field::zeros(*cfg.grid())).unwrap();
    assert_eq!(o.l1, 0.0);
    assert_eq!(o.positive_part, 0.0);
    assert!(o.weighted <= 0.0);
}

#[test]
fn small_contraction_batch_passes() {
    let p = ContractionParams {
        pairs: 4,
        ms: vec![0.5, 2.0],
        alphas: vec![0.3],
        seed: 9,
        ..ContractionParams::default()
    };
    let r = suite_contraction(&p).unwrap();
    assert!(r.all_pass(), "{:?}", r.failures().collect::<Vec<_>>());
    assert_eq!(r.checks.len(), 2 * 8 + 1);
}

#[test]
fn truncated_data_solves_and_stays_bounded() {
    let cfg = config(0.5, 4.0);
    let grid = *cfg.grid();
    let u0 = random_field(
        &grid,
        ProfileParams {
            amplitude: 6.0,
            width: 1.0,
            seed: 3,
        },
        true,
    );
    let t = truncate_data(&u0, 2.0, 1.0, &cutoff(2.5, &grid).unwrap()).unwrap();
    let h = solve(&cfg, &t).unwrap();
    for u in h.states() {
        assert!(u.values().iter().all(|&v| (-1.0 - 1e-12..=2.0 + 1e-12).contains(&v)));
    }
}

#[test]
fn coarse_sine_run_is_close() {
    let r = sine_run(0.5, 1e-2, std::f64::consts::PI / 40.0, 1.0).unwrap();
    assert!(r.relative_error < 0.02, "{}", r.relative_error);
    assert!(r.weak_residual_numeric < 1e-10);
    assert!(r.weak_residual > r.weak_residual_numeric);
}

#[test]
fn boundary_functional_exponent_tracks_m() {
    for m in [0.3, 0.5, 0.8] {
        let a = boundary_functional(4.0, m, 8000);
        let b = boundary_functional(8.0, m, 8000);
        assert!(((a / b).log2() - (m + 1.0)).abs() < 1e-3, "m {m}");
    }
}

//! Solver library for time-fractional nonlinear diffusion
//! `d/dt (k * [u - u0]) = Delta Phi(u)`.
//!
//! The crate is organised bottom-up: [`kernel`] holds the discrete kernel
//! calculus, [`nonlinearity`] the diffusion laws, [`spatial`] the grids and
//! weight fields, [`memory`] the implicit solver, [`ode`] the scalar
//! fractional relaxation problem, and [`harness`] the experiment runner
//! behind the `tfdiff` binary.

// `!(x > 0.0)` also rejects NaN, which is the point of most parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod kernel;
pub mod memory;
pub mod nonlinearity;
pub mod ode;
pub mod spatial;
pub mod special;

pub use error::{Error, Result};
pub use kernel::{
    discrete_convolve, max_sonine_residual, nonlocal_derivative, numeric_complement, resolvent_kernel, rl_weights,
    sonine_complement, sonine_residual, volterra_relaxation, yosida_kernel, KernelKind, KernelWeights, SampledFunction,
    TimeGrid,
};
pub use memory::{diagnostics, solve, step, weak_residual, Diagnostics, NewtonOptions, SolveConfig, StateHistory};
pub use nonlinearity::{power_law, regularize, Nonlinearity};
pub use ode::{envelope_check, mittag_leffler, nonextinction_comparator, solve_power_ode, OdeProblem};
pub use spatial::{
    build_laplacian, bump_weight, cutoff, gaussian, lq_norm, mass, torsion_zeta, weighted_l1, Field, Laplacian,
    SpaceGrid, WeightField, WeightKind,
};

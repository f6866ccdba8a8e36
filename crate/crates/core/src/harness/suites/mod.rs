//! Verification suites. Each returns a [`VerificationReport`](super::report::VerificationReport);
//! solver failures inside a suite become failed checks.

pub mod benchmark;
pub mod contraction;
pub mod kernels;
pub mod mass;
pub mod nonextinction;

pub use benchmark::{suite_benchmark, BenchmarkParams};
pub use contraction::{suite_contraction, ContractionParams};
pub use kernels::{suite_kernels, KernelParams};
pub use mass::{suite_mass, MassParams};
pub use nonextinction::{suite_nonextinction, NonextinctionParams};

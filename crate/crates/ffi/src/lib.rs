//! C ABI for the `tfdiff` solver library.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/solve
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`TfdiffStatus`]; on failure the message is kept per thread
//! and can be read with [`tfdiff_last_error_message`]. Panics are caught
//! and reported as [`TfdiffStatus::Panic`].

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use tfdiff::{
    max_sonine_residual, mittag_leffler, numeric_complement, power_law, regularize, rl_weights, solve, solve_power_ode,
    Error, Field, KernelWeights, OdeProblem, SolveConfig, SpaceGrid, StateHistory, TimeGrid,
};

/// Version of this interface; bumped on any incompatible change.
pub const TFDIFF_ABI_VERSION: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfdiffStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Shape = 3,
    InconsistentPair = 4,
    SingularDeconvolution = 5,
    InvalidWeights = 6,
    Config = 7,
    SupportViolation = 8,
    StepFailure = 9,
    BufferTooSmall = 10,
    Internal = 11,
    Panic = 12,
}

/// Discrete kernel weights `b_0..b_{J-1}`.
pub struct TfdiffKernel(KernelWeights);

/// States `u^0..u^J` of a one-dimensional solve.
pub struct TfdiffHistory(StateHistory);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> TfdiffStatus {
    match e {
        Error::Domain(_) => TfdiffStatus::Domain,
        Error::Shape(_) => TfdiffStatus::Shape,
        Error::InconsistentPair { .. } => TfdiffStatus::InconsistentPair,
        Error::SingularDeconvolution(_) => TfdiffStatus::SingularDeconvolution,
        Error::InvalidWeights(_) => TfdiffStatus::InvalidWeights,
        Error::Config(_) => TfdiffStatus::Config,
        Error::SupportViolation(_) => TfdiffStatus::SupportViolation,
        Error::StepFailure { .. } => TfdiffStatus::StepFailure,
        _ => TfdiffStatus::Internal,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Buffer { needed: usize, given: usize },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

// Runs `f`, records any failure and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TfdiffStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TfdiffStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer passed as {name}"));
            TfdiffStatus::NullPointer
        }
        Ok(Err(Failure::Buffer { needed, given })) => {
            set_error(format!("buffer holds {given} values, {needed} needed"));
            TfdiffStatus::BufferTooSmall
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            TfdiffStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> Result<(), Failure> {
    if buf.is_null() {
        return Err(Failure::Null("buf"));
    }
    if len < src.len() {
        return Err(Failure::Buffer {
            needed: src.len(),
            given: len,
        });
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

#[no_mangle]
pub extern "C" fn tfdiff_abi_version() -> u32 {
    TFDIFF_ABI_VERSION
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`) and returns the full message length
/// plus one. Passing a null `buf` only queries the length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn tfdiff_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            buf.add(n).write(0);
        }
        bytes.len() + 1
    })
}

/// Cell integrals of `t^{-alpha} / Gamma(1 - alpha)` on `steps` cells of
/// width `tau`.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn tfdiff_kernel_rl(
    alpha: f64,
    tau: f64,
    steps: usize,
    out: *mut *mut TfdiffKernel,
) -> TfdiffStatus {
    guard(|| {
        let k = rl_weights(alpha, TimeGrid::new(tau, steps)?)?;
        write_out(out, Box::into_raw(Box::new(TfdiffKernel(k))), "out")
    })
}

/// Kernel from caller-supplied weights (nonnegative, nonincreasing).
///
/// # Safety
/// `weights` must point to `steps` readable values; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn tfdiff_kernel_from_weights(
    tau: f64,
    weights: *const f64,
    steps: usize,
    out: *mut *mut TfdiffKernel,
) -> TfdiffStatus {
    guard(|| {
        if weights.is_null() {
            return Err(Failure::Null("weights"));
        }
        let b = std::slice::from_raw_parts(weights, steps).to_vec();
        let k = KernelWeights::new(TimeGrid::new(tau, steps)?, b, tfdiff::KernelKind::Numeric)?;
        write_out(out, Box::into_raw(Box::new(TfdiffKernel(k))), "out")
    })
}

/// Discrete complement `l` with `(k * l)(t_j) = 1` at every node.
///
/// # Safety
/// `k` must be a live kernel handle; `out` as above.
#[no_mangle]
pub unsafe extern "C" fn tfdiff_kernel_complement(k: *const TfdiffKernel, out: *mut *mut TfdiffKernel) -> TfdiffStatus {
    guard(|| {
        let ell = numeric_complement(&deref(k, "k")?.0)?;
        write_out(out, Box::into_raw(Box::new(TfdiffKernel(ell))), "out")
    })
}

/// Number of weights; 0 for a null handle.
///
/// # Safety
/// `k` must be null or a live kernel handle.
#[no_mangle]
pub unsafe extern "C" fn tfdiff_kernel_len(k: *const TfdiffKernel) -> usize {
    k.as_ref().map_or(0, |k| k.0.weights().len())
}

/// Copies the weights into `buf`, which must hold `tfdiff_kernel_len(k)` values.
///
/// # Safety
/// `k` must be a live kernel handle; `buf` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn tfdiff_kernel_weights(k: *const TfdiffKernel, buf: *mut f64, len: usize) -> TfdiffStatus {
    guard(|| copy_out(deref(k, "k")?.0.weights(), buf, len))
}

/// `max_j |(k * l)(t_j) - 1|`.
///
/// # Safety
/// `k` and `ell` must be live kernel handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfdiff_kernel_sonine_residual(
    k: *const TfdiffKernel,
    ell: *const TfdiffKernel,
    out: *mut f64,
) -> TfdiffStatus {
    guard(|| {
        let r = max_sonine_residual(&deref(k, "k")?.0, &deref(ell, "ell")?.0)?;
        write_out(out, r, "out")
    })
}

/// # Safety
/// `k` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn tfdiff_kernel_free(k: *mut TfdiffKernel) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// Mittag-Leffler function `E_alpha(z)` for `z <= 0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tfdiff_mittag_leffler(alpha: f64, z: f64, out: *mut f64) -> TfdiffStatus {
    guard(|| write_out(out, mittag_leffler(alpha, z)?, "out"))
}

/// Solves `d/dt(g * [v - v0]) = -lambda v^m` and writes `v_1..v_steps`.
///
/// # Safety
/// `buf` must point to `len >= steps` writable values.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn tfdiff_ode_solve(
    alpha: f64,
    lambda: f64,
    m: f64,
    v0: f64,
    tau: f64,
    steps: usize,
    buf: *mut f64,
    len: usize,
) -> TfdiffStatus {
    guard(|| {
        let p = OdeProblem {
            alpha,
            lambda,
            m,
            v0,
            tgrid: TimeGrid::new(tau, steps)?,
        };
        copy_out(solve_power_ode(&p)?.values(), buf, len)
    })
}

/// Implicit solve on `(lower, upper)` with mesh `h` and zero boundary
/// values. `u0` holds the interior nodes. For `m != 1` the nonlinearity is
/// regularized with index `regularization` and a cap one above `max |u0|`.
///
/// # Safety
/// `u0` must point to `u0_len` readable values; `out` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn tfdiff_solve_1d(
    alpha: f64,
    m: f64,
    regularization: u32,
    lower: f64,
    upper: f64,
    h: f64,
    tau: f64,
    steps: usize,
    u0: *const f64,
    u0_len: usize,
    out: *mut *mut TfdiffHistory,
) -> TfdiffStatus {
    guard(|| {
        if u0.is_null() {
            return Err(Failure::Null("u0"));
        }
        let grid = SpaceGrid::interval(lower, upper, h)?;
        let u0 = Field::new(grid, std::slice::from_raw_parts(u0, u0_len).to_vec())?;
        let base = power_law(m)?;
        let phi = if m == 1.0 {
            base
        } else {
            regularize(&base, u0.max_abs() + 1.0, regularization)?
        };
        let cfg = SolveConfig::new(rl_weights(alpha, TimeGrid::new(tau, steps)?)?, phi, grid)?;
        let history = solve(&cfg, &u0)?;
        write_out(out, Box::into_raw(Box::new(TfdiffHistory(history))), "out")
    })
}

/// Number of stored states, `steps + 1`; 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live history handle.
#[no_mangle]
pub unsafe extern "C" fn tfdiff_history_states(h: *const TfdiffHistory) -> usize {
    h.as_ref().map_or(0, |h| h.0.states().len())
}

/// Interior nodes per state; 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live history handle.
#[no_mangle]
pub unsafe extern "C" fn tfdiff_history_nodes(h: *const TfdiffHistory) -> usize {
    h.as_ref().map_or(0, |h| h.0.config().grid().len())
}

/// Copies state `u^j` into `buf`.
///
/// # Safety
/// `h` must be a live history handle; `buf` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn tfdiff_history_state(
    h: *const TfdiffHistory,
    j: usize,
    buf: *mut f64,
    len: usize,
) -> TfdiffStatus {
    guard(|| {
        let states = deref(h, "h")?.0.states();
        let u = states
            .get(j)
            .ok_or_else(|| Failure::Lib(Error::Domain(format!("state {j} out of range 0..{}", states.len()))))?;
        copy_out(u.values(), buf, len)
    })
}

/// # Safety
/// `h` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn tfdiff_history_free(h: *mut TfdiffHistory) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

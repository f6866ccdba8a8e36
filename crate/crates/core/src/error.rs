use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two objects that must share a grid do not.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A kernel pair does not satisfy the discrete Sonine identity.
    #[error("inconsistent kernel pair: max |k*l - 1| = {residual:e} exceeds {threshold:e}")]
    InconsistentPair { residual: f64, threshold: f64 },

    /// Deconvolution of `k * l = 1` needs a positive leading weight.
    #[error("singular deconvolution: leading kernel weight is {0}")]
    SingularDeconvolution(f64),

    /// Kernel weights violate positivity or monotonicity.
    #[error("invalid kernel weights: {0}")]
    InvalidWeights(String),

    /// The solver configuration cannot be used as given.
    #[error("configuration error: {0}")]
    Config(String),

    /// A test function touches the boundary layer of the grid.
    #[error("test function support reaches the boundary at node {0}")]
    SupportViolation(usize),

    /// Newton's method did not converge for a time step.
    #[error("step {step} failed after {iterations} iterations (residual {residual:e})")]
    StepFailure {
        step: usize,
        iterations: usize,
        residual: f64,
    },

    /// An internal invariant was violated.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

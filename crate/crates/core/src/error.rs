use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unphysical Bloch vector: |r| = {norm} exceeds 1")]
    UnphysicalBloch { norm: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("register of {0} qubits exceeds the dense limit of {max}", max = crate::qubit::MAX_QUBITS)]
    TooManyQubits(usize),

    #[error("Renyi index must be finite, positive and != 1 (got {0})")]
    InvalidAlpha(f64),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("no attractor: both eigenstates decay at the same rate (PT-unbroken phase)")]
    NoAttractor,

    #[error("degenerate steady state: the dominant Liouvillian eigenvalue is not unique")]
    DegenerateSteadyState,

    #[error("state norm underflow at t = {t} (trace {trace:e})")]
    TraceUnderflow { t: f64, trace: f64 },

    #[error("integration step size {0:e} underflows")]
    StepUnderflow(f64),

    #[error("trajectory {trajectory} diverged at step {step}")]
    StepDiverged { trajectory: usize, step: usize },

    #[error("trajectory {trajectory} left the Bloch ball at step {step} (|r| = {norm})")]
    NormViolation {
        trajectory: usize,
        step: usize,
        norm: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}

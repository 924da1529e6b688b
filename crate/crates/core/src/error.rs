//! Error type shared by all solver modules.

use thiserror::Error;

/// Errors produced by grid construction, the nonlinearity, the harmonic
/// solver, the time stepper and the analysis drivers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("mesh anisotropy: dx = {dx} but dy = {dy}; the scheme requires dx == dy")]
    MeshAnisotropy { dx: f64, dy: f64 },

    #[error("invalid extent: {0}")]
    InvalidExtent(String),

    #[error("node index ({i}, {k}) outside 0..={max_i} x 0..={max_k}")]
    IndexOutOfRange {
        i: usize,
        k: usize,
        max_i: usize,
        max_k: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("inconsistent nonlinearity: {0}")]
    InconsistentPhi(String),

    #[error(
        "harmonic solve did not converge: residual {residual:.3e} > tolerance {tolerance:.3e} \
         after {iterations} iterations"
    )]
    NonConvergence {
        residual: f64,
        tolerance: f64,
        iterations: usize,
    },

    #[error("corner violation: bottom[{index}] = {value}; the corner values must be exactly zero")]
    CornerViolation { index: usize, value: f64 },

    #[error("CFL violated: dt={dt}, C*dx={limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("length mismatch: expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("incommensurate grids: {0}")]
    IncommensurateGrids(String),

    #[error("degenerate error table: {0}")]
    DegenerateError(String),

    #[error("validation: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

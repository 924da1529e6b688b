//! Finite-difference solver for the porous-medium equation with half-order
//! fractional diffusion, `u_t + (-lap)^(1/2) phi(u) = 0`, in one space
//! dimension.
//!
//! The nonlocal operator is realized through its local extension: the
//! solution is the bottom trace of a field that is harmonic in an extra
//! vertical coordinate.  Each time step solves a five-point Laplace problem
//! on the extended rectangle and applies an explicit update rule to the
//! bottom row.
//!
//! Modules follow the shape of the method:
//!
//! - [`grid`]: the bounded rectangle, mesh and node classification;
//! - [`nonlinearity`]: `phi`, its inverse/derivative, data bounds and the
//!   CFL constant;
//! - [`laplace`]: the discrete harmonic extension (direct factorization and
//!   iterative fallbacks);
//! - [`scheme`]: startup and the explicit time stepper;
//! - [`analysis`]: closed-form references, truncation probes, refinement
//!   studies and the structural property suite.

pub mod analysis;
pub mod error;
pub mod grid;
pub mod laplace;
pub mod nonlinearity;
pub mod scheme;

pub use error::{Error, Result};
pub use grid::{build_grid, classify, sized_half_width, GridSpec, NodeClass};
pub use laplace::{
    harmonic_extension, stencil_residual, Field, HarmonicSolver, SolverMethod, SolverOptions,
};
pub use nonlinearity::{
    cfl_constant, data_bounds, validate_timestep, DataBounds, PhiSpec,
};
pub use scheme::{
    resolve_cfl, run, CflResolution, InitialData, RunConfig, Scheme, SchemeState, TimeSpec,
};

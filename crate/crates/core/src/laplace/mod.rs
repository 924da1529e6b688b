//! Discrete harmonic extension: the five-point Laplacian vanishes at every
//! interior node, the bottom row carries prescribed values and the remaining
//! boundary is zero.
//!
//! The interior operator is fixed per grid, so the default solver builds a
//! reusable direct factorization once ([`HarmonicSolver`]) and every time
//! step costs one application.  Red-black relaxation and conjugate-direction
//! iterations are available for very large grids; both accept a warm-start
//! seed.

mod direct;
mod iterative;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

pub use direct::DirectPlan;

/// Linear-solver selection for the harmonic extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverMethod {
    /// Exact per-grid factorization of the interior operator.
    #[default]
    DirectFactorization,
    /// Red-black Gauss-Seidel sweeps.
    IterativeRelaxation,
    /// Conjugate-direction iteration on the interior system.
    ConjugateDirection,
}

/// Options controlling the harmonic solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub method: SolverMethod,
    /// Max-norm bound on the interior stencil residual at acceptance.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Reuse the previous time step's field as the iterate seed.
    pub warm_start: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            method: SolverMethod::DirectFactorization,
            tolerance: 1e-9,
            max_iterations: 20_000,
            warm_start: true,
        }
    }
}

impl SolverOptions {
    /// Default tolerance for the iterative methods inside a time-stepping
    /// run: keeps per-step solver error strictly below the local truncation
    /// error so it cannot pollute observed convergence orders.
    pub fn step_tolerance(dx: f64, dt: f64) -> f64 {
        1e-2 * dx * dx * dt
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Validation(format!(
                "solver tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations < 1 {
            return Err(Error::Validation("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

/// Grid of w-values at one time level, stored row-major by `k` then `i`,
/// bottom row first.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: GridSpec) -> Self {
        Field {
            values: vec![0.0; grid.node_count()],
            grid,
        }
    }

    /// Builds a field by evaluating `f(i, k)` at every node.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.node_count());
        for k in 0..=grid.k_steps() {
            for i in 0..=grid.i_steps() {
                values.push(f(i, k));
            }
        }
        Field { grid, values }
    }

    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::LengthMismatch {
                expected: grid.node_count(),
                actual: values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite field value {bad}")));
        }
        Ok(Field { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn value(&self, i: usize, k: usize) -> f64 {
        self.values[self.grid.node_index(i, k)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The `I + 1` values on the bottom row `y = 0`.
    pub fn bottom_row(&self) -> &[f64] {
        &self.values[..self.grid.i_steps() + 1]
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// Maximum over interior nodes of the absolute five-point residual divided
/// by `dx^2`.
pub fn stencil_residual(field: &Field) -> f64 {
    let grid = field.grid;
    let (i_steps, k_steps) = (grid.i_steps(), grid.k_steps());
    let stride = i_steps + 1;
    let v = &field.values;
    let mut worst = 0.0_f64;
    for k in 1..k_steps {
        let row = k * stride;
        for i in 1..i_steps {
            let c = row + i;
            let r = v[c + 1] + v[c - 1] + v[c + stride] + v[c - stride] - 4.0 * v[c];
            worst = worst.max(r.abs());
        }
    }
    worst / (grid.dx() * grid.dx())
}

/// Reusable harmonic-extension solver for one grid.  Construction builds the
/// direct factorization when selected; the factorization is immutable and
/// concurrent solves against it are safe.
pub struct HarmonicSolver {
    grid: GridSpec,
    opts: SolverOptions,
    plan: Option<DirectPlan>,
}

impl HarmonicSolver {
    pub fn new(grid: GridSpec, opts: SolverOptions) -> Result<Self> {
        opts.validate()?;
        let plan = match opts.method {
            SolverMethod::DirectFactorization => Some(DirectPlan::new(&grid)),
            _ => None,
        };
        Ok(HarmonicSolver { grid, opts, plan })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn options(&self) -> &SolverOptions {
        &self.opts
    }

    /// Solves the extension problem for the given bottom row.  `seed` is
    /// used as the initial iterate by the iterative methods when
    /// `warm_start` is set; the direct factorization ignores it.
    pub fn solve(&self, bottom: &[f64], seed: Option<&Field>) -> Result<Field> {
        let i_steps = self.grid.i_steps();
        if bottom.len() != i_steps + 1 {
            return Err(Error::LengthMismatch {
                expected: i_steps + 1,
                actual: bottom.len(),
            });
        }
        for (index, value) in [(0, bottom[0]), (i_steps, bottom[i_steps])] {
            if value != 0.0 {
                return Err(Error::CornerViolation { index, value });
            }
        }
        if let Some(bad) = bottom.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite bottom value {bad}")));
        }
        let seed = if self.opts.warm_start { seed } else { None };
        match self.opts.method {
            SolverMethod::DirectFactorization => {
                Ok(self.plan.as_ref().expect("plan built at construction").solve(&self.grid, bottom))
            }
            SolverMethod::IterativeRelaxation => iterative::relaxation(
                &self.grid,
                bottom,
                self.opts.tolerance,
                self.opts.max_iterations,
                seed,
            ),
            SolverMethod::ConjugateDirection => iterative::conjugate_direction(
                &self.grid,
                bottom,
                self.opts.tolerance,
                self.opts.max_iterations,
                seed,
            ),
        }
    }
}

/// One-shot harmonic extension; builds a solver for the grid and discards
/// it.  Time-stepping code should hold a [`HarmonicSolver`] instead.
pub fn harmonic_extension(
    bottom: &[f64],
    grid: &GridSpec,
    opts: &SolverOptions,
    seed: Option<&Field>,
) -> Result<Field> {
    HarmonicSolver::new(*grid, *opts)?.solve(bottom, seed)
}

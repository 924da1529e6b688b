//! Verification instruments: closed-form reference solutions, the local
//! truncation probe, error metrics, refinement studies and the structural
//! property suite.

mod properties;
mod study;

pub use properties::{property_suite, PropertyCheck, PropertyReport, PropertyStatus};
pub use study::{exact_convergence_study, self_convergence_study};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::nonlinearity::PhiSpec;

/// Exact solution of the linear problem emanating from a unit Dirac mass:
/// `u(x, t) = (1/pi) t / (x^2 + t^2)` in one space dimension.
pub fn poisson_kernel_solution(x: f64, t: f64) -> f64 {
    debug_assert!(t > 0.0);
    std::f64::consts::FRAC_1_PI * t / (x * x + t * t)
}

/// Normalization constant of the Riesz form of the half Laplacian,
/// `C_N = pi^{-(N+1)/2} Gamma((N+1)/2)`.
pub fn riesz_constant(dimension: u32) -> f64 {
    assert!(dimension >= 1);
    let twice = dimension as u64 + 1; // Gamma(twice / 2)
    std::f64::consts::PI.powf(-(twice as f64) / 2.0) * gamma_half_integer(twice)
}

/// `Gamma(n/2)` by the exact half-integer recursion.
fn gamma_half_integer(n: u64) -> f64 {
    match n {
        0 => panic!("Gamma pole"),
        1 => std::f64::consts::PI.sqrt(),
        2 => 1.0,
        _ => (n as f64 / 2.0 - 1.0) * gamma_half_integer(n - 2),
    }
}

/// Self-similar scaling rates of the source solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarenblattExponents {
    pub alpha: f64,
    pub beta: f64,
    pub m: f64,
    pub dimension: u32,
}

/// `alpha = N / (N(m+1) + 1)`, `beta = 1 / (N(m+1) + 1)`.
pub fn barenblatt_exponents(m: f64, dimension: u32) -> Result<BarenblattExponents> {
    if !(m >= 1.0) || dimension < 1 {
        return Err(Error::Validation(format!(
            "exponents need m >= 1 and N >= 1, got m = {m}, N = {dimension}"
        )));
    }
    let n = dimension as f64;
    let denom = n * (m + 1.0) + 1.0;
    Ok(BarenblattExponents {
        alpha: n / denom,
        beta: 1.0 / denom,
        m,
        dimension,
    })
}

/// Upper bound for the source solution on the lateral boundary of a domain
/// of half-width `X`: `C_prof (T+1)^beta / X^(N+1)`.  Used to size growing
/// domains so the imposed zero on the sides is consistent.
pub fn barenblatt_tail_bound(
    half_width: f64,
    final_time: f64,
    m: f64,
    dimension: u32,
    profile_constant: f64,
) -> f64 {
    let beta = barenblatt_exponents(m, dimension)
        .expect("validated exponents")
        .beta;
    profile_constant * (final_time + 1.0).powf(beta) / half_width.powi(dimension as i32 + 1)
}

/// Smooth exact solution of the linear extension problem on the whole
/// half-plane: `e^{-t-y} cos x` is harmonic and satisfies the bottom rule
/// `d/dt u = d/dy w` exactly.  The canonical truncation probe.
pub fn cosine_extension_solution(x: f64, y: f64, t: f64) -> f64 {
    (-t - y).exp() * x.cos()
}

/// Separable decaying mode of the bounded linear problem on
/// `[-pi, pi] x [0, pi]`: harmonic, exactly zero on the lateral and top
/// boundaries, bottom rule exact.  Probes startup and full-trajectory
/// accuracy without lateral-boundary contamination.
pub fn boxed_mode_solution(x: f64, y: f64, t: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let rate = 1.0 / pi.tanh();
    (-rate * t).exp() * x.sin() * (pi - y).sinh()
}

/// Largest defect obtained by inserting an exact solution into the discrete
/// scheme for the step `t_{j-1} -> t_j`: the divided five-point residual
/// over interior nodes and the boundary-rule residual over the active
/// bottom nodes.
pub fn truncation_residual(
    w_exact: impl Fn(f64, f64, f64) -> f64,
    grid: &GridSpec,
    dt: f64,
    j: usize,
    phi: &PhiSpec,
) -> Result<f64> {
    let (interior, bottom) = truncation_residual_parts(w_exact, grid, dt, j, phi)?;
    Ok(interior.max(bottom))
}

/// The two components of [`truncation_residual`], separately maximized.
pub fn truncation_residual_parts(
    w_exact: impl Fn(f64, f64, f64) -> f64,
    grid: &GridSpec,
    dt: f64,
    j: usize,
    phi: &PhiSpec,
) -> Result<(f64, f64)> {
    assert!(j >= 1, "the probe needs a previous time level");
    let t_prev = dt * (j - 1) as f64;
    let t_next = dt * j as f64;
    let dx = grid.dx();
    let i_steps = grid.i_steps();
    let k_steps = grid.k_steps();

    let mut interior = 0.0_f64;
    for k in 1..k_steps {
        let y = grid.y(k);
        let y_up = grid.y(k + 1);
        let y_down = grid.y(k - 1);
        for i in 1..i_steps {
            let x = grid.x(i);
            let stencil = w_exact(grid.x(i + 1), y, t_prev)
                + w_exact(grid.x(i - 1), y, t_prev)
                + w_exact(x, y_up, t_prev)
                + w_exact(x, y_down, t_prev)
                - 4.0 * w_exact(x, y, t_prev);
            interior = interior.max((stencil / (dx * dx)).abs());
        }
    }

    let mut bottom = 0.0_f64;
    let y1 = grid.y(1);
    for i in 1..i_steps {
        let x = grid.x(i);
        let w0_prev = w_exact(x, 0.0, t_prev);
        let w1_prev = w_exact(x, y1, t_prev);
        let w0_next = w_exact(x, 0.0, t_next);
        let defect =
            dt / dx * (w1_prev - w0_prev) + phi.inverse(w0_prev)? - phi.inverse(w0_next)?;
        bottom = bottom.max(defect.abs());
    }
    Ok((interior, bottom))
}

/// Max-norm distance between two traces of equal length.
pub fn max_error(trace_a: &[f64], trace_b: &[f64]) -> Result<f64> {
    if trace_a.len() != trace_b.len() {
        return Err(Error::LengthMismatch {
            expected: trace_a.len(),
            actual: trace_b.len(),
        });
    }
    Ok(trace_a
        .iter()
        .zip(trace_b)
        .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs())))
}

/// Lattice mass of a trace: `dx` times the sum over the inner bottom nodes.
pub fn trace_mass(trace: &[f64], dx: f64) -> f64 {
    if trace.len() < 3 {
        return 0.0;
    }
    dx * trace[1..trace.len() - 1].iter().sum::<f64>()
}

/// One refinement level of an error table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub dx: f64,
    pub dt: f64,
    /// Spatial subinterval count of the level, matching the convention of
    /// refinement tables.
    pub nodes: usize,
    pub error: f64,
}

/// Refinement-study results with observed orders between consecutive rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub rows: Vec<ErrorRow>,
    /// `orders[k] = log(e_k / e_{k+1}) / log(dx_k / dx_{k+1})`; empty when
    /// any level has exactly zero error.
    pub orders: Vec<f64>,
}

impl ErrorTable {
    /// Assembles a table, filling the orders when every error is positive.
    pub fn from_rows(rows: Vec<ErrorRow>) -> Result<Self> {
        for pair in rows.windows(2) {
            if pair[1].dx >= pair[0].dx {
                return Err(Error::Validation(
                    "error-table rows must be sorted by strictly decreasing dx".into(),
                ));
            }
        }
        let mut table = ErrorTable {
            rows,
            orders: Vec::new(),
        };
        if table.rows.len() >= 2 && table.rows.iter().all(|r| r.error > 0.0) {
            table.orders = observed_order(&table)?;
        }
        Ok(table)
    }
}

/// Richardson order estimate between consecutive refinement levels.
pub fn observed_order(table: &ErrorTable) -> Result<Vec<f64>> {
    if table.rows.len() < 2 {
        return Err(Error::DegenerateError(
            "need at least two rows to estimate an order".into(),
        ));
    }
    if let Some(row) = table.rows.iter().find(|r| r.error <= 0.0) {
        return Err(Error::DegenerateError(format!(
            "non-positive error {} at dx = {}",
            row.error, row.dx
        )));
    }
    Ok(table
        .rows
        .windows(2)
        .map(|pair| (pair[0].error / pair[1].error).ln() / (pair[0].dx / pair[1].dx).ln())
        .collect())
}

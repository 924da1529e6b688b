//! Iterative fallbacks for very large grids: red-black Gauss-Seidel sweeps
//! and a conjugate-direction iteration, both warm-startable from the
//! previous time step's field.

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::laplace::{stencil_residual, Field};

/// Initial iterate: seed interior where available, prescribed boundary
/// everywhere else.
fn seeded_field(grid: &GridSpec, bottom: &[f64], seed: Option<&Field>) -> Field {
    let mut field = match seed {
        Some(prev) if prev.grid() == grid => prev.clone(),
        _ => Field::zeros(*grid),
    };
    let i_steps = grid.i_steps();
    let k_steps = grid.k_steps();
    let stride = i_steps + 1;
    let v = field.values_mut();
    v[..stride].copy_from_slice(bottom);
    for k in 1..=k_steps {
        v[k * stride] = 0.0;
        v[k * stride + i_steps] = 0.0;
    }
    for i in 0..=i_steps {
        v[k_steps * stride + i] = 0.0;
    }
    field
}

/// Red-black Gauss-Seidel relaxation.  Every update is a convex average of
/// neighbor values, so iterates stay inside the boundary-data envelope.
pub(super) fn relaxation(
    grid: &GridSpec,
    bottom: &[f64],
    tolerance: f64,
    max_iterations: usize,
    seed: Option<&Field>,
) -> Result<Field> {
    let mut field = seeded_field(grid, bottom, seed);
    let i_steps = grid.i_steps();
    let k_steps = grid.k_steps();
    let stride = i_steps + 1;
    let mut residual = f64::INFINITY;
    for sweep in 0..max_iterations {
        let v = field.values_mut();
        for parity in 0..2 {
            for k in 1..k_steps {
                let row = k * stride;
                let first = 1 + (k + parity) % 2;
                let mut i = first;
                while i < i_steps {
                    let c = row + i;
                    v[c] = 0.25 * (v[c + 1] + v[c - 1] + v[c + stride] + v[c - stride]);
                    i += 2;
                }
            }
        }
        residual = stencil_residual(&field);
        if residual <= tolerance {
            return Ok(field);
        }
        let _ = sweep;
    }
    Err(Error::NonConvergence {
        residual,
        tolerance,
        iterations: max_iterations,
    })
}

/// Conjugate-direction iteration on the interior unknowns of the
/// symmetric positive definite system `4 w - sum(neighbors) = rhs`.
pub(super) fn conjugate_direction(
    grid: &GridSpec,
    bottom: &[f64],
    tolerance: f64,
    max_iterations: usize,
    seed: Option<&Field>,
) -> Result<Field> {
    let i_steps = grid.i_steps();
    let k_steps = grid.k_steps();
    let (nx, ny) = (i_steps - 1, k_steps - 1);
    let n = nx * ny;
    let dx2 = grid.dx() * grid.dx();

    // A x on the interior lattice, zero beyond it.
    let apply = |x: &[f64], out: &mut [f64]| {
        for ky in 0..ny {
            for ix in 0..nx {
                let c = ky * nx + ix;
                let mut acc = 4.0 * x[c];
                if ix > 0 {
                    acc -= x[c - 1];
                }
                if ix + 1 < nx {
                    acc -= x[c + 1];
                }
                if ky > 0 {
                    acc -= x[c - nx];
                }
                if ky + 1 < ny {
                    acc -= x[c + nx];
                }
                out[c] = acc;
            }
        }
    };

    // Bottom row feeds the k = 1 equations.
    let mut rhs = vec![0.0; n];
    rhs[..nx].copy_from_slice(&bottom[1..i_steps]);

    let mut x = vec![0.0; n];
    if let Some(prev) = seed {
        if prev.grid() == grid {
            for ky in 0..ny {
                for ix in 0..nx {
                    x[ky * nx + ix] = prev.value(ix + 1, ky + 1);
                }
            }
        }
    }

    let mut r = vec![0.0; n];
    apply(&x, &mut r);
    for c in 0..n {
        r[c] = rhs[c] - r[c];
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr: f64 = r.iter().map(|v| v * v).sum();

    let max_abs = |v: &[f64]| v.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    let mut residual = max_abs(&r) / dx2;
    if residual <= tolerance {
        return Ok(assemble(grid, bottom, &x));
    }

    for iteration in 1..=max_iterations {
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            break; // lost positive-definiteness to rounding
        }
        let alpha = rr / pap;
        for c in 0..n {
            x[c] += alpha * p[c];
            r[c] -= alpha * ap[c];
        }
        residual = max_abs(&r) / dx2;
        if residual <= tolerance {
            // guard against recursive-residual drift
            apply(&x, &mut ap);
            let true_residual =
                (0..n).fold(0.0_f64, |a, c| a.max((rhs[c] - ap[c]).abs())) / dx2;
            if true_residual <= tolerance {
                return Ok(assemble(grid, bottom, &x));
            }
            residual = true_residual;
        }
        let rr_next: f64 = r.iter().map(|v| v * v).sum();
        let beta = rr_next / rr;
        rr = rr_next;
        for c in 0..n {
            p[c] = r[c] + beta * p[c];
        }
        let _ = iteration;
    }
    Err(Error::NonConvergence {
        residual,
        tolerance,
        iterations: max_iterations,
    })
}

fn assemble(grid: &GridSpec, bottom: &[f64], interior: &[f64]) -> Field {
    let i_steps = grid.i_steps();
    let stride = i_steps + 1;
    let nx = i_steps - 1;
    let mut field = Field::zeros(*grid);
    let v = field.values_mut();
    v[..stride].copy_from_slice(bottom);
    for ky in 0..grid.k_steps() - 1 {
        for ix in 0..nx {
            v[(ky + 1) * stride + ix + 1] = interior[ky * nx + ix];
        }
    }
    field
}

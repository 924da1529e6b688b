//! Grid-refinement studies: self-convergence against a fine reference and
//! the exact-solution study for the linear case.

use rayon::prelude::*;

use crate::analysis::{max_error, poisson_kernel_solution, ErrorRow, ErrorTable};
use crate::error::{Error, Result};
use crate::grid::build_grid;
use crate::nonlinearity::PhiSpec;
use crate::scheme::{InitialData, RunConfig, Scheme, TimeSpec};

fn integer_quotient(value: f64, name: &str) -> Result<usize> {
    let rounded = value.round();
    if (value - rounded).abs() > 1e-9 * value.abs().max(1.0) || rounded < 1.0 {
        return Err(Error::IncommensurateGrids(format!(
            "{name} = {value} is not a positive integer"
        )));
    }
    Ok(rounded as usize)
}

/// Builds the row configuration for one spacing: same domain, `dt = dx`,
/// CFL hard-fail so every level runs the requested step exactly.
fn level_config(base: &RunConfig, dx: f64) -> Result<RunConfig> {
    let x = base.grid.x_half_width();
    let y = base.grid.y_height();
    let t = base.time.final_time();
    let i_steps = integer_quotient(2.0 * x / dx, "2X/dx")?;
    let k_steps = integer_quotient(y / dx, "Y/dx")?;
    let j_steps = integer_quotient(t / dx, "T/dt")?;
    let mut config = base.clone();
    config.grid = build_grid(x, y, i_steps, k_steps)?;
    config.time = TimeSpec::new(t, j_steps)?;
    config.snapshot_times = Vec::new();
    config.strict_cfl = true;
    Ok(config)
}

fn final_trace(config: RunConfig) -> Result<Vec<f64>> {
    let snapshots = Scheme::new(config)?.run()?;
    Ok(snapshots.into_iter().last().expect("final snapshot").trace)
}

/// Compares final-time traces at decreasing spacings against a fine
/// reference run, restricted to the coarse nodes.  Every `dx` must be an
/// integer multiple of `dx_ref` so no interpolation enters the orders.
pub fn self_convergence_study(
    base: &RunConfig,
    dx_list: &[f64],
    dx_ref: f64,
) -> Result<ErrorTable> {
    if dx_list.is_empty() {
        return Err(Error::Validation("dx list must not be empty".into()));
    }
    for pair in dx_list.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::Validation(
                "dx list must be strictly decreasing".into(),
            ));
        }
    }
    let smallest = *dx_list.last().expect("nonempty");
    if dx_ref > smallest {
        return Err(Error::Validation(format!(
            "reference spacing {dx_ref} must not exceed the finest level {smallest}"
        )));
    }
    let ratios: Vec<usize> = dx_list
        .iter()
        .map(|&dx| integer_quotient(dx / dx_ref, "dx/dx_ref"))
        .collect::<Result<_>>()?;

    let reference = final_trace(level_config(base, dx_ref)?)?;

    let rows: Vec<ErrorRow> = dx_list
        .par_iter()
        .zip(ratios)
        .map(|(&dx, ratio)| -> Result<ErrorRow> {
            let config = level_config(base, dx)?;
            let nodes = config.grid.i_steps();
            let dt = config.time.dt();
            let trace = final_trace(config)?;
            let restricted: Vec<f64> = (0..trace.len()).map(|i| reference[i * ratio]).collect();
            let error = max_error(&trace, &restricted)?;
            Ok(ErrorRow {
                dx,
                dt,
                nodes,
                error,
            })
        })
        .collect::<Result<_>>()?;

    ErrorTable::from_rows(rows)
}

/// Exact-solution study for the linear case: Cauchy-kernel data on
/// `[-100, 100] x [0, 100]` run to `T = 1` with `dt = dx`, compared on the
/// inner bottom nodes against the Dirac solution at time 2.
pub fn exact_convergence_study(dx_list: &[f64]) -> Result<ErrorTable> {
    if dx_list.is_empty() {
        return Err(Error::Validation("dx list must not be empty".into()));
    }
    for pair in dx_list.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::Validation(
                "dx list must be strictly decreasing".into(),
            ));
        }
    }
    let rows: Vec<ErrorRow> = dx_list
        .par_iter()
        .map(|&dx| -> Result<ErrorRow> {
            let i_steps = integer_quotient(200.0 / dx, "2X/dx")?;
            let k_steps = integer_quotient(100.0 / dx, "Y/dx")?;
            let j_steps = integer_quotient(1.0 / dx, "T/dt")?;
            let grid = build_grid(100.0, 100.0, i_steps, k_steps)?;
            let time = TimeSpec::new(1.0, j_steps)?;
            let mut config = RunConfig::new(
                grid,
                time,
                PhiSpec::power_law(1.0)?,
                InitialData::CauchyKernel,
            );
            config.strict_cfl = true;
            let trace = final_trace(config)?;
            let error = (1..i_steps).fold(0.0_f64, |acc, i| {
                let exact = poisson_kernel_solution(grid.x(i), 2.0);
                acc.max((trace[i] - exact).abs())
            });
            Ok(ErrorRow {
                dx,
                dt: time.dt(),
                nodes: i_steps,
                error,
            })
        })
        .collect::<Result<_>>()?;

    ErrorTable::from_rows(rows)
}

//! Manufactured-solution checks against the separable decaying mode of the
//! bounded linear problem: startup accuracy and full-trajectory error.

use std::f64::consts::PI;

use fpme_core::analysis::boxed_mode_solution;
use fpme_core::{build_grid, GridSpec, InitialData, PhiSpec, RunConfig, Scheme, TimeSpec};

fn mode_config(n: usize) -> (GridSpec, RunConfig) {
    let grid = build_grid(PI, PI, n, n / 2).unwrap();
    let samples: Vec<f64> = (0..=n)
        .map(|i| boxed_mode_solution(grid.x(i), 0.0, 0.0))
        .collect();
    // J = n/4 keeps T = pi/2 across refinement levels with dt = dx
    let time = TimeSpec::new(PI / 2.0, n / 4).unwrap();
    let config = RunConfig::new(
        grid,
        time,
        PhiSpec::power_law(1.0).unwrap(),
        InitialData::Sampled(samples),
    );
    (grid, config)
}

fn field_error_at(grid: &GridSpec, field: &fpme_core::Field, t: f64) -> f64 {
    let mut worst = 0.0_f64;
    for k in 0..=grid.k_steps() {
        for i in 0..=grid.i_steps() {
            let exact = boxed_mode_solution(grid.x(i), grid.y(k), t);
            worst = worst.max((field.value(i, k) - exact).abs());
        }
    }
    worst
}

#[test]
fn startup_error_is_second_order() {
    // the mode vanishes on the homogeneous boundary, so the startup field
    // differs from it only by the discrete-Laplace error
    let errors: Vec<f64> = [32usize, 64, 128]
        .iter()
        .map(|&n| {
            let (grid, config) = mode_config(n);
            let state = Scheme::new(config).unwrap().initialize().unwrap();
            field_error_at(&grid, &state.field, 0.0)
        })
        .collect();
    for pair in errors.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!(
            (3.0..=5.0).contains(&ratio),
            "startup ratio {ratio} (errors {errors:?})"
        );
    }
}

#[test]
fn trajectory_error_decays_at_first_order() {
    let mut rows = Vec::new();
    for n in [32usize, 64, 128] {
        let (grid, config) = mode_config(n);
        let snapshots = Scheme::new(config).unwrap().run().unwrap();
        let last = snapshots.last().unwrap();
        // trace error against the exact bottom values
        let trace_error = (0..=grid.i_steps()).fold(0.0_f64, |acc, i| {
            let exact = boxed_mode_solution(grid.x(i), 0.0, last.time);
            acc.max((last.trace[i] - exact).abs())
        });
        let field_error = field_error_at(&grid, &last.field, last.time);
        rows.push((grid.dx(), trace_error, field_error));
    }
    for pair in rows.windows(2) {
        let (dx0, trace0, field0) = pair[0];
        let (dx1, trace1, field1) = pair[1];
        assert!(trace1 < trace0 && field1 < field0, "errors must decrease: {rows:?}");
        let order = (trace0 / trace1).ln() / (dx0 / dx1).ln();
        assert!(order >= 0.9, "trace order {order} (rows {rows:?})");
    }
}

//! Explicit time stepper for the extended problem.
//!
//! Startup solves the harmonic extension of `phi(f)`; each subsequent step
//! applies the explicit boundary rule to the bottom row and re-extends.  The
//! boundary rule is evaluated in u-variables (inverse map, update, forward
//! map), which avoids cancellation for strong nonlinearities.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::laplace::{Field, HarmonicSolver, SolverOptions};
use crate::nonlinearity::{cfl_constant, data_bounds, validate_timestep, DataBounds, PhiSpec};

/// Uniform time discretization of `[0, T]` into `J` steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSpec {
    final_time: f64,
    steps: usize,
}

impl TimeSpec {
    pub fn new(final_time: f64, steps: usize) -> Result<Self> {
        if !(final_time > 0.0) || !final_time.is_finite() {
            return Err(Error::Validation(format!(
                "final time must be positive and finite, got {final_time}"
            )));
        }
        if steps < 1 {
            return Err(Error::Validation("need at least one time step".into()));
        }
        Ok(TimeSpec { final_time, steps })
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.final_time / self.steps as f64
    }

    /// Time of step `j`; exact at both endpoints.
    pub fn t(&self, j: usize) -> f64 {
        self.final_time * (j as f64 / self.steps as f64)
    }
}

/// Initial datum `f` on the line.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    /// Smooth compactly supported bump on `[-1, 1]`, normalized so the peak
    /// value is `amplitude`.
    Bump { amplitude: f64 },
    /// `f(x) = (1/pi) / (x^2 + 1)`, the unit-mass Poisson kernel at t = 1.
    CauchyKernel,
    /// Lattice delta: `mass / dx` at the node nearest `x = 0`.
    DiracLike { mass: f64 },
    /// User samples at the `I + 1` bottom nodes.
    Sampled(Vec<f64>),
}

impl InitialData {
    /// Evaluates the datum at every bottom node.
    pub fn sample(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        let i_steps = grid.i_steps();
        match self {
            InitialData::Bump { amplitude } => Ok((0..=i_steps)
                .map(|i| bump(grid.x(i)) * amplitude)
                .collect()),
            InitialData::CauchyKernel => Ok((0..=i_steps)
                .map(|i| {
                    let x = grid.x(i);
                    std::f64::consts::FRAC_1_PI / (x * x + 1.0)
                })
                .collect()),
            InitialData::DiracLike { mass } => {
                let mut samples = vec![0.0; i_steps + 1];
                // node nearest x = 0; ties resolve to the lower index
                let center = (grid.x_half_width() / grid.dx()).round() as usize;
                samples[center.min(i_steps)] = mass / grid.dx();
                Ok(samples)
            }
            InitialData::Sampled(values) => {
                if values.len() != i_steps + 1 {
                    return Err(Error::LengthMismatch {
                        expected: i_steps + 1,
                        actual: values.len(),
                    });
                }
                Ok(values.clone())
            }
        }
    }
}

/// `e * exp(-1/((1-x)(1+x)))` on `(-1, 1)`, zero outside.  Written as a
/// single exponential so the peak value at `x = 0` is exactly 1.
fn bump(x: f64) -> f64 {
    if x.abs() < 1.0 {
        (1.0 - 1.0 / ((1.0 - x) * (1.0 + x))).exp()
    } else {
        0.0
    }
}

/// Full description of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub time: TimeSpec,
    pub phi: PhiSpec,
    pub initial: InitialData,
    pub solver: SolverOptions,
    /// Snapshot times in `[0, T]`; `t = 0` and `t = T` are always included.
    pub snapshot_times: Vec<f64>,
    /// `K_dom` of the growing-domain mode when the grid was sized by it.
    pub growing_domain: Option<f64>,
    /// Profile constant for the lateral tail bound; defaults to the initial
    /// trace mass when absent.
    pub tail_constant: Option<f64>,
    /// Reject CFL-violating steps instead of shrinking `dt`.
    pub strict_cfl: bool,
}

impl RunConfig {
    pub fn new(grid: GridSpec, time: TimeSpec, phi: PhiSpec, initial: InitialData) -> Self {
        RunConfig {
            grid,
            time,
            phi,
            initial,
            solver: SolverOptions::default(),
            snapshot_times: Vec::new(),
            growing_domain: None,
            tail_constant: None,
            strict_cfl: false,
        }
    }

    /// Growing-domain construction: sizes `X = Y` from the spacing and the
    /// domain constant `K_dom` so that `X >= K_dom / dx` with an exactly
    /// closing mesh.
    pub fn with_growing_domain(
        dx: f64,
        k_dom: f64,
        time: TimeSpec,
        phi: PhiSpec,
        initial: InitialData,
    ) -> Result<Self> {
        if !(dx > 0.0) || !(k_dom > 0.0) {
            return Err(Error::Validation(format!(
                "growing domain needs dx > 0 and K_dom > 0, got dx = {dx}, K_dom = {k_dom}"
            )));
        }
        let half_width = crate::grid::sized_half_width(dx, k_dom);
        let steps = (half_width / dx).round() as usize;
        let grid = crate::grid::build_grid(half_width, half_width, 2 * steps, steps)?;
        let mut config = RunConfig::new(grid, time, phi, initial);
        config.growing_domain = Some(k_dom);
        Ok(config)
    }
}

/// State after `j` steps: full field, bottom trace in u-variables and the
/// clock.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeState {
    pub field: Field,
    pub trace: Vec<f64>,
    pub j: usize,
    pub time: f64,
}

impl SchemeState {
    /// Rebuilds the trace of an externally assembled field.
    pub fn from_field(field: Field, phi: &PhiSpec, j: usize, time: f64) -> Result<Self> {
        let trace = field
            .bottom_row()
            .iter()
            .map(|&w| phi.inverse(w))
            .collect::<Result<Vec<f64>>>()?;
        Ok(SchemeState {
            field,
            trace,
            j,
            time,
        })
    }
}

/// How the time step was reconciled with the CFL restriction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CflResolution {
    /// The constant `C` with admissible `dt <= C * dx`.
    pub constant: f64,
    pub bounds: DataBounds,
    pub requested_dt: f64,
    pub effective: TimeSpec,
    pub adjusted: bool,
}

/// Prepared run: grid, nonlinearity, reusable factorization and the
/// CFL-resolved time spec.  A run is sequential in time; independent
/// schemes may execute concurrently.
pub struct Scheme {
    config: RunConfig,
    solver: HarmonicSolver,
    samples: Vec<f64>,
    cfl: CflResolution,
}

/// Samples the data, computes the CFL constant and reconciles the time
/// step: under `strict_cfl` an inadmissible `dt` is an error, otherwise
/// `dt` shrinks to the largest admissible step that preserves `T`.
pub fn resolve_cfl(config: &RunConfig) -> Result<CflResolution> {
    let samples = config.initial.sample(&config.grid)?;
    let bounds = data_bounds(&samples, &config.phi)?;
    let constant = cfl_constant(&config.phi, &bounds)?;
    let requested_dt = config.time.dt();
    let dx = config.grid.dx();
    let final_time = config.time.final_time();
    let (effective, adjusted) = if validate_timestep(requested_dt, dx, constant) {
        (config.time, false)
    } else if config.strict_cfl {
        return Err(Error::CflViolation {
            dt: requested_dt,
            limit: constant * dx,
        });
    } else {
        let steps = (final_time / (constant * dx)).ceil() as usize;
        (TimeSpec::new(final_time, steps.max(config.time.steps()))?, true)
    };
    Ok(CflResolution {
        constant,
        bounds,
        requested_dt,
        effective,
        adjusted,
    })
}

impl Scheme {
    pub fn new(config: RunConfig) -> Result<Self> {
        let final_time = config.time.final_time();
        for &t in &config.snapshot_times {
            if !(0.0..=final_time).contains(&t) {
                return Err(Error::Validation(format!(
                    "snapshot time {t} outside [0, {final_time}]"
                )));
            }
        }
        let cfl = resolve_cfl(&config)?;
        let samples = config.initial.sample(&config.grid)?;
        let solver = HarmonicSolver::new(config.grid, config.solver)?;
        Ok(Scheme {
            config,
            solver,
            samples,
            cfl,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn grid(&self) -> &GridSpec {
        &self.config.grid
    }

    pub fn phi(&self) -> &PhiSpec {
        &self.config.phi
    }

    /// The time spec actually used (possibly CFL-adjusted).
    pub fn time_spec(&self) -> &TimeSpec {
        &self.cfl.effective
    }

    pub fn cfl(&self) -> &CflResolution {
        &self.cfl
    }

    pub fn data_bounds(&self) -> &DataBounds {
        &self.cfl.bounds
    }

    /// Startup state: harmonic extension of `phi(f)` with zeroed corners.
    pub fn initialize(&self) -> Result<SchemeState> {
        let i_steps = self.config.grid.i_steps();
        let mut bottom = vec![0.0; i_steps + 1];
        let mut trace = vec![0.0; i_steps + 1];
        for i in 1..i_steps {
            bottom[i] = self.config.phi.apply(self.samples[i])?;
            trace[i] = self.samples[i];
        }
        let field = self.solver.solve(&bottom, None)?;
        Ok(SchemeState {
            field,
            trace,
            j: 0,
            time: 0.0,
        })
    }

    /// The updated trace in u-variables:
    /// `u_i' = (dt/dx) (W_i^1 - W_i^0) + u_i` at inner bottom nodes.
    fn updated_trace(&self, state: &SchemeState) -> Result<Vec<f64>> {
        let dt = self.cfl.effective.dt();
        let dx = self.config.grid.dx();
        if !validate_timestep(dt, dx, self.cfl.constant) {
            return Err(Error::CflViolation {
                dt,
                limit: self.cfl.constant * dx,
            });
        }
        let i_steps = self.config.grid.i_steps();
        let ratio = dt / dx;
        let mut next = vec![0.0; i_steps + 1];
        for i in 1..i_steps {
            let flux = state.field.value(i, 1) - state.field.value(i, 0);
            next[i] = ratio * flux + state.trace[i];
        }
        Ok(next)
    }

    /// New bottom row in w-variables (the explicit boundary rule).
    pub fn boundary_update(&self, state: &SchemeState) -> Result<Vec<f64>> {
        let trace = self.updated_trace(state)?;
        let i_steps = self.config.grid.i_steps();
        let mut bottom = vec![0.0; i_steps + 1];
        for i in 1..i_steps {
            bottom[i] = self.config.phi.apply(trace[i])?;
        }
        Ok(bottom)
    }

    /// Advances one step: boundary update, then harmonic extension.
    pub fn step(&self, state: &SchemeState) -> Result<SchemeState> {
        let trace = self.updated_trace(state)?;
        let i_steps = self.config.grid.i_steps();
        let mut bottom = vec![0.0; i_steps + 1];
        for i in 1..i_steps {
            bottom[i] = self.config.phi.apply(trace[i])?;
        }
        let field = self.solver.solve(&bottom, Some(&state.field))?;
        let j = state.j + 1;
        Ok(SchemeState {
            field,
            trace,
            j,
            time: self.cfl.effective.t(j),
        })
    }

    /// Step indices at which snapshots are taken: the requested times
    /// rounded to the nearest grid time, plus `t = 0` and `t = T`.
    pub fn snapshot_steps(&self) -> BTreeSet<usize> {
        let steps = self.cfl.effective.steps();
        let dt = self.cfl.effective.dt();
        let mut wanted: BTreeSet<usize> = BTreeSet::new();
        wanted.insert(0);
        wanted.insert(steps);
        for &t in &self.config.snapshot_times {
            wanted.insert(((t / dt).round() as usize).min(steps));
        }
        wanted
    }

    /// Runs the full trajectory and returns the snapshot states in time
    /// order.
    pub fn run(&self) -> Result<Vec<SchemeState>> {
        let wanted = self.snapshot_steps();
        let steps = self.cfl.effective.steps();
        let mut snapshots = Vec::with_capacity(wanted.len());
        let mut state = self.initialize()?;
        if wanted.contains(&0) {
            snapshots.push(state.clone());
        }
        for j in 1..=steps {
            state = self.step(&state)?;
            if wanted.contains(&j) {
                snapshots.push(state.clone());
            }
        }
        Ok(snapshots)
    }
}

/// Convenience wrapper: prepare and run in one call.
pub fn run(config: RunConfig) -> Result<Vec<SchemeState>> {
    Scheme::new(config)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use approx::assert_relative_eq;

    fn cauchy_reference_config(steps_per_unit: usize) -> RunConfig {
        let grid = build_grid(100.0, 100.0, 200 * steps_per_unit, 100 * steps_per_unit).unwrap();
        let time = TimeSpec::new(1.0, steps_per_unit).unwrap();
        RunConfig::new(
            grid,
            time,
            PhiSpec::power_law(1.0).unwrap(),
            InitialData::CauchyKernel,
        )
    }

    #[test]
    fn zero_data_stays_zero() {
        let grid = build_grid(2.0, 2.0, 8, 4).unwrap();
        let time = TimeSpec::new(1.0, 4).unwrap();
        let config = RunConfig::new(
            grid,
            time,
            PhiSpec::power_law(2.0).unwrap(),
            InitialData::Sampled(vec![0.0; 9]),
        );
        let snapshots = run(config).unwrap();
        assert_eq!(snapshots.len(), 2);
        for state in snapshots {
            assert!(state.field.values().iter().all(|&v| v == 0.0));
            assert!(state.trace.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn startup_bottom_is_phi_of_data() {
        // normalized bump peaks at 1, squared under m = 2
        let grid = build_grid(2.0, 2.0, 4, 2).unwrap();
        let time = TimeSpec::new(0.1, 4).unwrap();
        let config = RunConfig::new(
            grid,
            time,
            PhiSpec::power_law(2.0).unwrap(),
            InitialData::Bump { amplitude: 1.0 },
        );
        let scheme = Scheme::new(config).unwrap();
        let state = scheme.initialize().unwrap();
        assert_relative_eq!(state.field.value(2, 0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(state.trace[2], 1.0, max_relative = 1e-14);
        assert_eq!(state.field.value(0, 0), 0.0);
        assert_eq!(state.field.value(4, 0), 0.0);
    }

    #[test]
    fn startup_trace_matches_cauchy_kernel() {
        let scheme = Scheme::new(cauchy_reference_config(1)).unwrap();
        let state = scheme.initialize().unwrap();
        assert_relative_eq!(state.trace[100], std::f64::consts::FRAC_1_PI, max_relative = 1e-14);
    }

    #[test]
    fn trace_is_inverse_of_bottom_row() {
        let grid = build_grid(3.0, 3.0, 24, 12).unwrap();
        let time = TimeSpec::new(0.5, 8).unwrap();
        let config = RunConfig::new(
            grid,
            time,
            PhiSpec::power_law(3.0).unwrap(),
            InitialData::Bump { amplitude: 0.9 },
        );
        let scheme = Scheme::new(config).unwrap();
        let mut state = scheme.initialize().unwrap();
        for _ in 0..3 {
            state = scheme.step(&state).unwrap();
        }
        for (i, &w) in state.field.bottom_row().iter().enumerate() {
            let u = scheme.phi().inverse(w).unwrap();
            assert!((u - state.trace[i]).abs() <= 1e-12 * u.abs().max(1.0));
        }
    }

    #[test]
    fn steady_state_keeps_bottom_row() {
        let grid = build_grid(1.0, 2.0, 2, 2).unwrap();
        let time = TimeSpec::new(0.5, 1).unwrap();
        let phi = PhiSpec::power_law(2.0).unwrap();
        let config = RunConfig::new(grid, time, phi.clone(), InitialData::Sampled(vec![0.0, 0.8, 0.0]));
        let scheme = Scheme::new(config).unwrap();
        // field constant in the two bottom rows: no vertical flux
        let field = Field::from_fn(grid, |i, k| if i == 1 && k <= 1 { 0.64 } else { 0.0 });
        let state = SchemeState::from_field(field, &phi, 0, 0.0).unwrap();
        let out = scheme.boundary_update(&state).unwrap();
        assert_eq!(out[0], 0.0);
        assert_eq!(out[2], 0.0);
        assert_relative_eq!(out[1], 0.64, max_relative = 1e-14);
    }

    #[test]
    fn linear_case_update_is_affine() {
        let grid = build_grid(2.0, 2.0, 4, 2).unwrap();
        let time = TimeSpec::new(0.25, 1).unwrap(); // dt/dx = 0.25
        let phi = PhiSpec::power_law(1.0).unwrap();
        let config = RunConfig::new(grid, time, phi.clone(), InitialData::Bump { amplitude: 1.0 });
        let scheme = Scheme::new(config).unwrap();
        let state = scheme.initialize().unwrap();
        let out = scheme.boundary_update(&state).unwrap();
        for i in 1..4 {
            let want = 0.25 * (state.field.value(i, 1) - state.field.value(i, 0))
                + state.field.value(i, 0);
            assert_relative_eq!(out[i], want, max_relative = 1e-14);
        }
    }

    #[test]
    fn quadratic_update_example() {
        // dt/dx = 0.5, W_i^1 = 0.64, W_i^0 = 1, m = 2:
        // out = ((0.5)(-0.36) + 1)^2 = 0.6724
        let grid = build_grid(1.0, 2.0, 2, 2).unwrap();
        let time = TimeSpec::new(0.5, 1).unwrap();
        let phi = PhiSpec::power_law(2.0).unwrap();
        let config = RunConfig::new(grid, time, phi.clone(), InitialData::Sampled(vec![0.0, 1.0, 0.0]));
        let scheme = Scheme::new(config).unwrap();
        let field = Field::from_fn(grid, |i, k| match (i, k) {
            (1, 0) => 1.0,
            (1, 1) => 0.64,
            _ => 0.0,
        });
        let state = SchemeState::from_field(field, &phi, 0, 0.0).unwrap();
        let out = scheme.boundary_update(&state).unwrap();
        assert_relative_eq!(out[1], 0.6724, max_relative = 1e-14);
    }

    #[test]
    fn one_reference_step_lowers_the_peak() {
        let scheme = Scheme::new(cauchy_reference_config(1)).unwrap();
        let initial = scheme.initialize().unwrap();
        let stepped = scheme.step(&initial).unwrap();
        assert!(stepped.trace[100] < initial.trace[100]);
        assert_eq!(stepped.j, 1);
        assert_eq!(stepped.time, 1.0);
    }

    #[test]
    fn runs_are_deterministic() {
        let make = || {
            let grid = build_grid(3.0, 3.0, 30, 15).unwrap();
            let time = TimeSpec::new(0.5, 10).unwrap();
            RunConfig::new(
                grid,
                time,
                PhiSpec::power_law(2.0).unwrap(),
                InitialData::Bump { amplitude: 0.5 },
            )
        };
        let a = run(make()).unwrap();
        let b = run(make()).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.field.values(), y.field.values());
            assert_eq!(x.trace, y.trace);
        }
    }

    #[test]
    fn snapshots_include_endpoints_and_requested_times() {
        let grid = build_grid(2.0, 2.0, 8, 4).unwrap();
        let time = TimeSpec::new(1.0, 8).unwrap();
        let mut config = RunConfig::new(
            grid,
            time,
            PhiSpec::power_law(1.0).unwrap(),
            InitialData::Bump { amplitude: 1.0 },
        );
        config.snapshot_times = vec![0.49];
        let scheme = Scheme::new(config).unwrap();
        let snapshots = scheme.run().unwrap();
        let times: Vec<f64> = snapshots.iter().map(|s| s.time).collect();
        assert_eq!(times, vec![0.0, 0.5, 1.0]);

        // only t = 0 requested: endpoints still present, first is startup
        let mut config = scheme.config().clone();
        config.snapshot_times = vec![0.0];
        let scheme = Scheme::new(config).unwrap();
        let snapshots = scheme.run().unwrap();
        assert_eq!(snapshots.len(), 2);
        assert_eq!(snapshots[0].j, 0);
        let startup = scheme.initialize().unwrap();
        assert_eq!(snapshots[0].field.values(), startup.field.values());
    }

    #[test]
    fn cfl_adjustment_shrinks_dt_and_preserves_final_time() {
        let grid = build_grid(2.0, 2.0, 8, 4).unwrap();
        let time = TimeSpec::new(1.0, 1).unwrap(); // dt = 1 > C dx = 0.25 * 0.5
        let config = RunConfig::new(
            grid,
            time,
            PhiSpec::power_law(2.0).unwrap(),
            InitialData::Bump { amplitude: 2.0 },
        );
        let scheme = Scheme::new(config).unwrap();
        let cfl = scheme.cfl();
        assert!(cfl.adjusted);
        assert!(cfl.effective.dt() <= cfl.constant * 0.5 + 1e-15);
        assert_eq!(cfl.effective.final_time(), 1.0);

        let mut strict = scheme.config().clone();
        strict.strict_cfl = true;
        match Scheme::new(strict) {
            Err(Error::CflViolation { .. }) => {}
            Err(other) => panic!("expected CflViolation, got {other:?}"),
            Ok(_) => panic!("expected CflViolation, got a scheme"),
        }
    }

    #[test]
    fn dirac_mass_lands_on_center_node() {
        let grid = build_grid(4.0, 2.0, 16, 4).unwrap();
        let samples = InitialData::DiracLike { mass: 2.0 }.sample(&grid).unwrap();
        assert_eq!(samples[8], 2.0 / 0.5);
        assert_eq!(samples.iter().filter(|&&v| v != 0.0).count(), 1);
    }

    #[test]
    fn sampled_length_is_checked() {
        let grid = build_grid(1.0, 1.0, 4, 2).unwrap();
        assert!(matches!(
            InitialData::Sampled(vec![0.0; 3]).sample(&grid),
            Err(Error::LengthMismatch { .. })
        ));
    }
}

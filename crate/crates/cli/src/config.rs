//! Run-configuration files: flat key-value sections in TOML syntax,
//! strictly validated (unknown keys are rejected), with a writer that
//! round-trips through the parser.

use serde::{Deserialize, Serialize};

use fpme_core::{
    build_grid, resolve_cfl, CflResolution, InitialData, PhiSpec, RunConfig, SolverMethod,
    SolverOptions, TimeSpec,
};

use crate::CliError;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    grid: GridSection,
    time: TimeSection,
    phi: PhiSection,
    initial: InitialSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    solver: Option<SolverSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<OutputSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    domain: Option<DomainSection>,
}

/// Either an explicit rectangle (x, y, i, k) or a growing domain
/// (dx here plus k_dom in [domain]).
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    i: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dx: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TimeSection {
    t: f64,
    j: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PhiSection {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialSection {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    warm_start: Option<bool>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    snapshot_times: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    full_field: Option<bool>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainSection {
    k_dom: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    tail_constant: Option<f64>,
}

/// CLI-level output switches carried alongside the run configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OutputOptions {
    pub full_field: bool,
}

/// Parses and fully validates a configuration document.  The CFL condition
/// is resolved here: the returned configuration carries the effective time
/// spec, and the resolution is reported so callers can surface adjustments.
pub fn parse_config(
    text: &str,
    strict_cfl: bool,
) -> Result<(RunConfig, OutputOptions, CflResolution), CliError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;

    let validation = |message: String| CliError::Validation(message);

    // grid: explicit rectangle or growing domain
    let g = &file.grid;
    let growing = file.domain.as_ref().map(|d| d.k_dom);
    let grid = match (g.x, g.y, g.i, g.k, g.dx, growing) {
        (Some(x), Some(y), Some(i), Some(k), None, None) => {
            build_grid(x, y, i, k).map_err(CliError::Core)?
        }
        (None, None, None, None, Some(dx), Some(k_dom)) => {
            if !(dx > 0.0) || !(k_dom > 0.0) {
                return Err(validation(format!(
                    "growing domain needs dx > 0 and k_dom > 0, got dx = {dx}, k_dom = {k_dom}"
                )));
            }
            let half_width = fpme_core::sized_half_width(dx, k_dom);
            let steps = (half_width / dx).round() as usize;
            build_grid(half_width, half_width, 2 * steps, steps).map_err(CliError::Core)?
        }
        _ => {
            return Err(validation(
                "grid must specify either x, y, i, k or dx together with [domain] k_dom".into(),
            ))
        }
    };

    let time = TimeSpec::new(file.time.t, file.time.j).map_err(CliError::Core)?;

    let phi = match file.phi.kind.as_str() {
        "power" => {
            let m = file
                .phi
                .m
                .ok_or_else(|| validation("phi.kind = \"power\" requires m".into()))?;
            if !(m >= 1.0) {
                return Err(validation(format!("m must be >= 1, got {m}")));
            }
            PhiSpec::power_law(m).map_err(CliError::Core)?
        }
        "log" => {
            if file.phi.m.is_some() {
                return Err(validation("phi.kind = \"log\" takes no m".into()));
            }
            PhiSpec::logarithmic()
        }
        other => {
            return Err(validation(format!(
                "unknown phi kind {other:?} (expected \"power\" or \"log\")"
            )))
        }
    };

    let init = &file.initial;
    let only = |wanted: &str, extras: &[(&str, bool)]| -> Result<(), CliError> {
        for (name, present) in extras {
            if *present {
                return Err(validation(format!(
                    "initial.kind = {wanted:?} does not take {name}"
                )));
            }
        }
        Ok(())
    };
    let initial = match init.kind.as_str() {
        "bump" => {
            only("bump", &[("mass", init.mass.is_some()), ("values", init.values.is_some())])?;
            InitialData::Bump {
                amplitude: init.amplitude.unwrap_or(1.0),
            }
        }
        "cauchy" => {
            only(
                "cauchy",
                &[
                    ("amplitude", init.amplitude.is_some()),
                    ("mass", init.mass.is_some()),
                    ("values", init.values.is_some()),
                ],
            )?;
            InitialData::CauchyKernel
        }
        "dirac" => {
            only("dirac", &[("amplitude", init.amplitude.is_some()), ("values", init.values.is_some())])?;
            InitialData::DiracLike {
                mass: init.mass.unwrap_or(1.0),
            }
        }
        "samples" => {
            only("samples", &[("amplitude", init.amplitude.is_some()), ("mass", init.mass.is_some())])?;
            let values = init
                .values
                .clone()
                .ok_or_else(|| validation("initial.kind = \"samples\" requires values".into()))?;
            if values.len() != grid.i_steps() + 1 {
                return Err(validation(format!(
                    "initial values must have {} entries for this grid, got {}",
                    grid.i_steps() + 1,
                    values.len()
                )));
            }
            InitialData::Sampled(values)
        }
        other => {
            return Err(validation(format!(
                "unknown initial kind {other:?} (expected \"bump\", \"cauchy\", \"dirac\" or \"samples\")"
            )))
        }
    };

    let defaults = SolverOptions::default();
    let solver = match &file.solver {
        Some(section) => {
            let method = match section.method.as_deref() {
                None | Some("direct") => SolverMethod::DirectFactorization,
                Some("relaxation") => SolverMethod::IterativeRelaxation,
                Some("conjugate") => SolverMethod::ConjugateDirection,
                Some(other) => {
                    return Err(validation(format!(
                        "unknown solver method {other:?} (expected \"direct\", \"relaxation\" or \"conjugate\")"
                    )))
                }
            };
            let tolerance = section.tolerance.unwrap_or_else(|| {
                if method == SolverMethod::DirectFactorization {
                    defaults.tolerance
                } else {
                    SolverOptions::step_tolerance(grid.dx(), time.dt())
                }
            });
            if !(tolerance > 0.0) {
                return Err(validation(format!("solver tolerance must be positive, got {tolerance}")));
            }
            let max_iterations = section.max_iterations.unwrap_or(defaults.max_iterations);
            if max_iterations < 1 {
                return Err(validation("solver max_iterations must be >= 1".into()));
            }
            SolverOptions {
                method,
                tolerance,
                max_iterations,
                warm_start: section.warm_start.unwrap_or(defaults.warm_start),
            }
        }
        None => defaults,
    };

    let (snapshot_times, full_field) = match &file.output {
        Some(section) => (
            section.snapshot_times.clone().unwrap_or_default(),
            section.full_field.unwrap_or(false),
        ),
        None => (Vec::new(), false),
    };
    for &t in &snapshot_times {
        if !(0.0..=time.final_time()).contains(&t) {
            return Err(validation(format!(
                "snapshot time {t} outside [0, {}]",
                time.final_time()
            )));
        }
    }

    let mut config = RunConfig::new(grid, time, phi, initial);
    config.solver = solver;
    config.snapshot_times = snapshot_times;
    config.growing_domain = growing;
    config.tail_constant = file.domain.as_ref().and_then(|d| d.tail_constant);
    config.strict_cfl = strict_cfl;

    // CFL is resolved at parse time; the effective dt is recorded in the
    // returned configuration.
    let resolution = resolve_cfl(&config).map_err(CliError::Core)?;
    config.time = resolution.effective;

    Ok((config, OutputOptions { full_field }, resolution))
}

/// Writes a configuration document that parses back to the same run
/// configuration.  Custom nonlinearities have no file form.
pub fn render_config(config: &RunConfig, output: &OutputOptions) -> Result<String, CliError> {
    let grid = match config.growing_domain {
        Some(k_dom) => {
            let _ = k_dom;
            GridSection {
                x: None,
                y: None,
                i: None,
                k: None,
                dx: Some(config.grid.dx()),
            }
        }
        None => GridSection {
            x: Some(config.grid.x_half_width()),
            y: Some(config.grid.y_height()),
            i: Some(config.grid.i_steps()),
            k: Some(config.grid.k_steps()),
            dx: None,
        },
    };
    let phi = match &config.phi {
        PhiSpec::PowerLaw { m } => PhiSection {
            kind: "power".into(),
            m: Some(*m),
        },
        PhiSpec::Logarithmic => PhiSection {
            kind: "log".into(),
            m: None,
        },
        PhiSpec::Custom(_) => {
            return Err(CliError::Validation(
                "custom nonlinearities have no configuration-file form".into(),
            ))
        }
    };
    let initial = match &config.initial {
        InitialData::Bump { amplitude } => InitialSection {
            kind: "bump".into(),
            amplitude: Some(*amplitude),
            mass: None,
            values: None,
        },
        InitialData::CauchyKernel => InitialSection {
            kind: "cauchy".into(),
            amplitude: None,
            mass: None,
            values: None,
        },
        InitialData::DiracLike { mass } => InitialSection {
            kind: "dirac".into(),
            amplitude: None,
            mass: Some(*mass),
            values: None,
        },
        InitialData::Sampled(values) => InitialSection {
            kind: "samples".into(),
            amplitude: None,
            mass: None,
            values: Some(values.clone()),
        },
    };
    let method = match config.solver.method {
        SolverMethod::DirectFactorization => "direct",
        SolverMethod::IterativeRelaxation => "relaxation",
        SolverMethod::ConjugateDirection => "conjugate",
    };
    let file = ConfigFile {
        grid,
        time: TimeSection {
            t: config.time.final_time(),
            j: config.time.steps(),
        },
        phi,
        initial,
        solver: Some(SolverSection {
            method: Some(method.into()),
            tolerance: Some(config.solver.tolerance),
            max_iterations: Some(config.solver.max_iterations),
            warm_start: Some(config.solver.warm_start),
        }),
        output: Some(OutputSection {
            snapshot_times: Some(config.snapshot_times.clone()),
            full_field: Some(output.full_field),
        }),
        domain: config.growing_domain.map(|k_dom| DomainSection {
            k_dom,
            tail_constant: config.tail_constant,
        }),
    };
    toml::to_string_pretty(&file).map_err(|e| CliError::Render(e.to_string()))
}

//! `fpme` — command-line driver for the fractional porous-medium solver.
//!
//! Subcommands: `run` (time-step a configuration and write trace
//! snapshots), `converge-self` / `converge-exact` (refinement studies),
//! `verify` (structural property suite) and `info` (echo the resolved
//! configuration).  Exit codes: 0 success, 1 validation or parse failure,
//! 2 numerical failure, 3 property-suite failure.

mod config;
mod output;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fpme_core::analysis::{exact_convergence_study, property_suite, self_convergence_study};
use fpme_core::Scheme;

use config::{parse_config, render_config, OutputOptions};
use output::fmt17;

#[derive(Debug)]
pub enum CliError {
    Core(fpme_core::Error),
    Io(String),
    Parse(String),
    Render(String),
    Validation(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io: {e}"),
            CliError::Parse(e) => write!(f, "parse: {e}"),
            CliError::Render(e) => write!(f, "render: {e}"),
            CliError::Validation(e) => write!(f, "validation: {e}"),
        }
    }
}

impl From<fpme_core::Error> for CliError {
    fn from(e: fpme_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(fpme_core::Error::NonConvergence { .. }) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "fpme",
    about = "Finite-difference solver for the fractional porous-medium equation via the harmonic extension",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory for snapshot, table and report files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Fail instead of shrinking dt when the CFL condition is violated.
    #[arg(long, global = true)]
    strict_cfl: bool,

    /// Also write the full extended field for every snapshot.
    #[arg(long, global = true)]
    full_field: bool,

    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Time-step a configuration and write trace snapshots.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Self-convergence study: refine dx (= dt) against a fine reference.
    ConvergeSelf {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated decreasing spacings, e.g. 0.2,0.1,0.05
        #[arg(long, value_delimiter = ',', required = true)]
        dx: Vec<f64>,
        /// Reference spacing; must divide every entry of --dx.
        #[arg(long)]
        dx_ref: f64,
    },
    /// Exact-solution study for the linear case on [-100,100] x [0,100].
    ConvergeExact {
        /// Comma-separated decreasing spacings, e.g. 1,0.5,0.25
        #[arg(long, value_delimiter = ',', required = true)]
        dx: Vec<f64>,
    },
    /// Run the structural property suite; nonzero exit if any check fails.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Configuration with pointwise-smaller initial data, enabling the
        /// comparison and contraction checks.
        #[arg(long)]
        pair: Option<PathBuf>,
    },
    /// Print the resolved configuration and derived quantities.
    Info {
        #[arg(long)]
        config: PathBuf,
    },
}

fn read_config(
    path: &Path,
    strict_cfl: bool,
    quiet: bool,
) -> Result<(fpme_core::RunConfig, OutputOptions), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let (config, output, resolution) = parse_config(&text, strict_cfl)?;
    if resolution.adjusted && !quiet {
        eprintln!(
            "warning: CFL restriction dt <= {} shrank dt from {} to {} (J = {})",
            fmt17(resolution.constant * config.grid.dx()),
            fmt17(resolution.requested_dt),
            fmt17(config.time.dt()),
            config.time.steps()
        );
    }
    Ok((config, output))
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Run { config } => {
            let (config, file_output) = read_config(config, cli.strict_cfl, cli.quiet)?;
            let grid = config.grid;
            let scheme = Scheme::new(config)?;
            let snapshots = scheme.run()?;
            let full_field = cli.full_field || file_output.full_field;
            let written = output::write_snapshots(&cli.out, &grid, &snapshots, full_field)?;
            if !cli.quiet {
                for path in &written {
                    println!("wrote {}", path.display());
                }
            }
            Ok(0)
        }
        Command::ConvergeSelf { config, dx, dx_ref } => {
            let (config, _) = read_config(config, cli.strict_cfl, cli.quiet)?;
            let table = self_convergence_study(&config, dx, *dx_ref)?;
            let path = cli.out.join("convergence_self.tsv");
            output::write_error_table(&path, &table)?;
            if !cli.quiet {
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
        Command::ConvergeExact { dx } => {
            let table = exact_convergence_study(dx)?;
            let path = cli.out.join("convergence_exact.tsv");
            output::write_error_table(&path, &table)?;
            if !cli.quiet {
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
        Command::Verify { config, pair } => {
            let (config, _) = read_config(config, cli.strict_cfl, cli.quiet)?;
            let pair = match pair {
                Some(path) => Some(read_config(path, cli.strict_cfl, cli.quiet)?.0),
                None => None,
            };
            let report = property_suite(&config, pair.as_ref())?;
            let path = cli.out.join("properties.txt");
            output::write_property_report(&path, &report)?;
            if !cli.quiet {
                print!("{}", output::render_property_report(&report));
                println!("wrote {}", path.display());
            }
            Ok(if report.all_passed() { 0 } else { 3 })
        }
        Command::Info { config } => {
            let (config, file_output) = read_config(config, cli.strict_cfl, cli.quiet)?;
            let rendered = render_config(&config, &file_output)?;
            let resolution = fpme_core::resolve_cfl(&config)?;
            println!("{rendered}");
            println!("# derived");
            println!("# dx={}", fmt17(config.grid.dx()));
            println!("# dt={}", fmt17(config.time.dt()));
            println!("# nodes={}", config.grid.node_count());
            println!("# cfl_constant={}", fmt17(resolution.constant));
            println!(
                "# data_bounds=[{}, {}] phi_bounds=[{}, {}]",
                fmt17(resolution.bounds.u_min),
                fmt17(resolution.bounds.u_max),
                fmt17(resolution.bounds.b_min),
                fmt17(resolution.bounds.b_max)
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

//! Plot-ready delimited text outputs.  Every numeric is written with 17
//! significant digits so files are deterministic and parse back to the
//! exact binary values.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use fpme_core::analysis::{ErrorTable, PropertyReport, PropertyStatus};
use fpme_core::{GridSpec, SchemeState};

use crate::CliError;

/// Round-trip-exact decimal form (17 significant digits).
pub fn fmt17(value: f64) -> String {
    format!("{value:.16e}")
}

fn io_err(path: &Path, err: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {err}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    file.write_all(contents.as_bytes())
        .map_err(|e| io_err(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

/// One file per snapshot: two header lines, then `x<TAB>u` rows over the
/// full bottom.
pub fn write_snapshots(
    dir: &Path,
    grid: &GridSpec,
    snapshots: &[SchemeState],
    full_field: bool,
) -> Result<Vec<PathBuf>, CliError> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    for (index, state) in snapshots.iter().enumerate() {
        let mut text = String::new();
        text.push_str(&format!("# t={}\n", fmt17(state.time)));
        text.push_str(&format!("# dx={}\n", fmt17(grid.dx())));
        for (i, &u) in state.trace.iter().enumerate() {
            text.push_str(&format!("{}\t{}\n", fmt17(grid.x(i)), fmt17(u)));
        }
        let path = dir.join(format!("snapshot_{index:03}.tsv"));
        write_file(&path, &text)?;
        written.push(path);

        if full_field {
            let mut text = String::new();
            text.push_str(&format!("# t={}\n", fmt17(state.time)));
            text.push_str(&format!("# dx={}\n", fmt17(grid.dx())));
            for k in 0..=grid.k_steps() {
                for i in 0..=grid.i_steps() {
                    text.push_str(&format!(
                        "{}\t{}\t{}\n",
                        fmt17(grid.x(i)),
                        fmt17(grid.y(k)),
                        fmt17(state.field.value(i, k))
                    ));
                }
            }
            let path = dir.join(format!("field_{index:03}.tsv"));
            write_file(&path, &text)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Error table: `dx dt nodes error order`, one row per refinement level,
/// the order column blank on the first row.
pub fn write_error_table(path: &Path, table: &ErrorTable) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        ensure_dir(dir)?;
    }
    let mut text = String::from("dx dt nodes error order\n");
    for (row_index, row) in table.rows.iter().enumerate() {
        text.push_str(&format!(
            "{} {} {} {}",
            fmt17(row.dx),
            fmt17(row.dt),
            row.nodes,
            fmt17(row.error)
        ));
        if row_index > 0 {
            if let Some(order) = table.orders.get(row_index - 1) {
                text.push_str(&format!(" {}", fmt17(*order)));
            }
        }
        text.push('\n');
    }
    write_file(path, &text)
}

/// Property report: one line per check plus a summary.
pub fn write_property_report(path: &Path, report: &PropertyReport) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        ensure_dir(dir)?;
    }
    write_file(path, &render_property_report(report))
}

pub fn render_property_report(report: &PropertyReport) -> String {
    let mut text = String::new();
    text.push_str(&format!(
        "# dt={} dx={} cfl_constant={}\n",
        fmt17(report.dt),
        fmt17(report.dx),
        fmt17(report.cfl_constant)
    ));
    for check in &report.checks {
        let tag = match check.status {
            PropertyStatus::Passed => "PASS",
            PropertyStatus::Failed => "FAIL",
            PropertyStatus::Skipped => "SKIP",
        };
        text.push_str(&format!(
            "{tag} {} violation={} allowed={} {}\n",
            check.name,
            fmt17(check.violation),
            fmt17(check.allowance),
            check.detail
        ));
    }
    text.push_str(if report.all_passed() {
        "RESULT pass\n"
    } else {
        "RESULT fail\n"
    });
    text
}

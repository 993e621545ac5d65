//! Plot-ready CSVs derived from the traces of an earlier run.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::io::{read_table, write_table};

pub const PLOT_DIR: &str = "plots";

fn column(header: &[String], name: &str, path: &Path) -> Result<usize, CliError> {
    header.iter().position(|h| h == name).ok_or_else(|| CliError::Format {
        path: path.to_path_buf(),
        message: format!("missing column `{name}`"),
    })
}

/// Projects `columns` of the table at `src` into `dst`, renaming them to
/// `names`.
fn project(src: &Path, dst: &Path, columns: &[&str], names: &[&str]) -> Result<(), CliError> {
    let (header, rows) = read_table(src)?;
    let idx = columns.iter().map(|c| column(&header, c, src)).collect::<Result<Vec<_>, _>>()?;
    let out: Vec<Vec<String>> = rows.iter().map(|r| idx.iter().map(|&i| r[i].clone()).collect()).collect();
    write_table(dst, names, &out)
}

/// Writes `energy_vs_iteration.csv`, `slice_energy_profile.csv` and
/// `residual_vs_delta.csv` into `<report_dir>/plots` for whichever traces are
/// present.
pub fn emit_plot_data(report_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let width = report_dir.join("width_trace.csv");
    let shorten = report_dir.join("shorten_trace.csv");
    let profile = report_dir.join("slice_profile.csv");
    let near = report_dir.join("near_max.csv");
    let mut jobs: Vec<(PathBuf, &str, Vec<&str>, Vec<&str>)> = Vec::new();
    if width.is_file() {
        jobs.push((width, "energy_vs_iteration.csv", vec!["iter", "max_energy"], vec!["iteration", "energy"]));
    } else if shorten.is_file() {
        jobs.push((shorten, "energy_vs_iteration.csv", vec!["iter", "energy"], vec!["iteration", "energy"]));
    }
    if profile.is_file() {
        jobs.push((
            profile,
            "slice_energy_profile.csv",
            vec!["checkpoint", "slice", "t", "energy"],
            vec!["checkpoint", "slice", "t", "energy"],
        ));
    }
    if near.is_file() {
        jobs.push((
            near,
            "residual_vs_delta.csv",
            vec!["delta_fraction", "delta", "max_residual"],
            vec!["delta_fraction", "delta", "max_residual"],
        ));
    }
    if jobs.is_empty() {
        return Err(CliError::MissingTrace(report_dir.to_path_buf()));
    }
    let dir = report_dir.join(PLOT_DIR);
    fs::create_dir_all(&dir).map_err(CliError::io(format!("creating {}", dir.display())))?;
    let mut written = Vec::with_capacity(jobs.len());
    for (src, name, cols, names) in jobs {
        let dst = dir.join(name);
        project(&src, &dst, &cols, &names)?;
        written.push(dst);
    }
    Ok(written)
}

//! Curve CSVs, sweepout directories and trace tables.
//!
//! A curve file is
//!
//! ```text
//! L,m,speed
//! 64,16,2.2627416997969522e1
//! x,y,z
//! <2·L·m rows of ambient coordinates>
//! ```
//!
//! with every real written to 17 significant digits so that reading a file
//! back reproduces the curve bit for bit.

use std::fs;
use std::path::{Path, PathBuf};

use bmm_core::{DiscreteCurve, Surface, SurfaceSpec, Sweepout, Vec3};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Formats a real with 17 significant digits.
pub fn exact(x: f64) -> String {
    format!("{x:.16e}")
}

/// Shortest representation that parses back to the same value.
pub fn short(x: f64) -> String {
    format!("{x:e}")
}

fn format_err(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Format { path: path.to_path_buf(), message: message.into() }
}

pub fn write_curve(path: &Path, curve: &DiscreteCurve) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_path(path).map_err(|e| csv_err(path, e))?;
    let rows: [Vec<String>; 3] = [
        vec!["L".into(), "m".into(), "speed".into()],
        vec![curve.l().to_string(), curve.m().to_string(), exact(curve.speed())],
        vec!["x".into(), "y".into(), "z".into()],
    ];
    for r in rows {
        w.write_record(&r).map_err(|e| csv_err(path, e))?;
    }
    for p in curve.samples() {
        w.write_record([exact(p[0]), exact(p[1]), exact(p[2])]).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(CliError::io(format!("writing {}", path.display())))
}

pub fn read_curve(path: &Path) -> Result<DiscreteCurve, CliError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let mut records = r.records();
    let mut next = |what: &str| -> Result<csv::StringRecord, CliError> {
        records
            .next()
            .ok_or_else(|| format_err(path, format!("missing {what}")))?
            .map_err(|e| csv_err(path, e))
    };
    let header = next("header")?;
    if header.iter().collect::<Vec<_>>() != ["L", "m", "speed"] {
        return Err(format_err(path, "first line must be `L,m,speed`"));
    }
    let values = next("L,m,speed values")?;
    if values.len() != 3 {
        return Err(format_err(path, "expected three values after the header"));
    }
    let l: usize = values[0].parse().map_err(|_| format_err(path, "L is not an integer"))?;
    let m: usize = values[1].parse().map_err(|_| format_err(path, "m is not an integer"))?;
    let speed: f64 = values[2].parse().map_err(|_| format_err(path, "speed is not a number"))?;
    let columns = next("coordinate header")?;
    if columns.iter().collect::<Vec<_>>() != ["x", "y", "z"] {
        return Err(format_err(path, "third line must be `x,y,z`"));
    }
    let mut samples = Vec::with_capacity(2 * l * m);
    for (i, rec) in records.enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        if rec.len() != 3 {
            return Err(format_err(path, format!("row {i} has {} fields", rec.len())));
        }
        let mut c = [0.0; 3];
        for (j, field) in rec.iter().enumerate() {
            c[j] = field.parse().map_err(|_| format_err(path, format!("row {i}: `{field}` is not a number")))?;
        }
        samples.push(Vec3(c));
    }
    DiscreteCurve::from_parts(l, m, speed, samples)
        .map_err(|e| format_err(path, format!("{e} (expected {} rows)", 2 * l * m)))
}

/// `manifest.toml` of a sweepout directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepoutManifest {
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub scale: f64,
    pub surface: SurfaceSpec,
    pub slices: Vec<String>,
}

pub const MANIFEST: &str = "manifest.toml";

/// Writes `slice_###.csv` files and a manifest into `dir`.
pub fn write_sweepout(dir: &Path, surface: &Surface, sweepout: &Sweepout) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(CliError::io(format!("creating {}", dir.display())))?;
    let mut names = Vec::with_capacity(sweepout.len());
    let mut paths = Vec::with_capacity(sweepout.len() + 1);
    for (k, slice) in sweepout.slices().iter().enumerate() {
        let name = format!("slice_{k:03}.csv");
        let path = dir.join(&name);
        write_curve(&path, slice)?;
        names.push(name);
        paths.push(path);
    }
    let manifest = SweepoutManifest {
        k: sweepout.len(),
        l: sweepout.l(),
        m: sweepout.m(),
        scale: surface.scale(),
        surface: surface.spec().clone(),
        slices: names,
    };
    let path = dir.join(MANIFEST);
    write_toml(&path, &manifest)?;
    paths.push(path);
    Ok(paths)
}

pub fn read_sweepout(dir: &Path, surface: &Surface) -> Result<Sweepout, CliError> {
    let path = dir.join(MANIFEST);
    let manifest: SweepoutManifest = read_toml(&path)?;
    if manifest.slices.len() != manifest.k {
        return Err(format_err(&path, "slice list does not match k"));
    }
    let slices = manifest
        .slices
        .iter()
        .map(|name| read_curve(&dir.join(name)))
        .collect::<Result<Vec<_>, _>>()?;
    if slices.iter().any(|s| s.l() != manifest.l || s.m() != manifest.m) {
        return Err(format_err(&path, "slice grid differs from the manifest"));
    }
    Ok(Sweepout::new(surface, slices)?)
}

pub fn write_toml<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = toml::to_string(value).map_err(|e| format_err(path, e.to_string()))?;
    fs::write(path, text).map_err(CliError::io(format!("writing {}", path.display())))
}

pub fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(CliError::io(format!("reading {}", path.display())))?;
    toml::from_str(&text).map_err(|e| format_err(path, e.message().to_string()))
}

/// Writes a headed CSV table.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(CliError::io(format!("writing {}", path.display())))
}

/// Reads a headed CSV table as strings.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = r.headers().map_err(|e| csv_err(path, e))?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(String::from).collect()).map_err(|e| csv_err(path, e)))
        .collect::<Result<Vec<Vec<String>>, _>>()?;
    Ok((header, rows))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(source) => CliError::Io { context: path.display().to_string(), source },
            _ => unreachable!(),
        }
    } else {
        format_err(path, e.to_string())
    }
}

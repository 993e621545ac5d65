//! Command dispatch and output layout.

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bmm_core::sweepout::{
    degree_value, latitude_sweepout, linearize_with, max_energy, near_max_slices_with, tighten_with,
};
use bmm_core::{
    normalize_with, shorten_to_geodesic, DiscreteCurve, Error, PartialResult, ShorteningTrace, Surface,
    SurfaceKind, Sweepout, WidthEstimate,
};

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::io::{exact, read_curve, write_curve, write_sweepout, write_table, write_toml};
use crate::par::RayonExecutor;
use crate::plots::emit_plot_data;
use crate::report::{
    ErrorReport, NearMaxReport, NormalizeReport, PropertiesReport, RunReport, ShortenReport, TightenReport,
    WidthReport,
};
use crate::suites::{self, SuiteParams};

/// Near-max bands tabulated by `width`, as fractions of the width.
pub const TREND_FRACTIONS: [f64; 3] = [1e-1, 1e-2, 1e-3];
/// Sizes of the degree check run by `check-properties`.
pub const DEGREE_SLICES: usize = 17;
pub const DEGREE_SAMPLES: usize = 4;
pub const DEGREE_ITERATIONS: usize = 100;
/// Slices of the continuity test set.
pub const CONTINUITY_CURVES: usize = 10;
/// Residual threshold for the length-decrease suite, in units of the scale.
pub const PROPERTY4_EPSILON: f64 = 0.5;

pub const RUN_REPORT: &str = "run_report.toml";
pub const ERROR_REPORT: &str = "error_report.toml";

/// Runs `config.command` and writes every output under `config.output_dir`.
/// On failure an error report is written there as well, when possible.
pub fn run(config: &RunConfig) -> Result<RunReport, CliError> {
    let command = config.command.ok_or_else(|| CliError::Config(vec!["command is not set".into()]))?;
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(CliError::io(format!("creating {}", dir.display())))?;
    let start = Instant::now();
    let mut out = Outputs::new(dir);
    let result = dispatch(command, config, &mut out);
    match result {
        Ok(scale) => {
            let report = RunReport {
                version: env!("CARGO_PKG_VERSION").into(),
                command: command.name().into(),
                scale,
                wall_time_seconds: start.elapsed().as_secs_f64(),
                outputs: out.names,
                config: config.clone(),
            };
            write_toml(&dir.join(RUN_REPORT), &report)?;
            Ok(report)
        }
        Err(e) => {
            let details = match &e {
                CliError::Config(msgs) | CliError::PropertyFailed(msgs) => msgs.clone(),
                _ => out.names.clone(),
            };
            let report = ErrorReport {
                version: env!("CARGO_PKG_VERSION").into(),
                command: command.name().into(),
                kind: e.kind().into(),
                exit_code: e.exit_code(),
                message: e.to_string(),
                details,
            };
            // The original error matters more than a failure to record it.
            let _ = write_toml(&dir.join(ERROR_REPORT), &report);
            Err(e)
        }
    }
}

/// Tracks files written under the output directory.
struct Outputs {
    dir: PathBuf,
    names: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), names: Vec::new() }
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.names.push(name.to_string());
        self.dir.join(name)
    }

    fn record(&mut self, path: &Path) {
        let rel = path.strip_prefix(&self.dir).unwrap_or(path);
        self.names.push(rel.display().to_string());
    }
}

fn dispatch(command: Command, config: &RunConfig, out: &mut Outputs) -> Result<Option<f64>, CliError> {
    if command == Command::EmitPlots {
        for p in emit_plot_data(&config.output_dir)? {
            out.record(&p);
        }
        return Ok(None);
    }
    let surface = normalize_with(&config.surface, config.tolerances)?;
    let exec = RayonExecutor::new(config.workers);
    match command {
        Command::Normalize => normalize_cmd(&surface, out)?,
        Command::Shorten => shorten_cmd(&surface, config, out)?,
        Command::Tighten => {
            tighten_cmd(&surface, config, &exec, out)?;
        }
        Command::Width => width_cmd(&surface, config, &exec, out)?,
        Command::CheckProperties => properties_cmd(&surface, config, &exec, out)?,
        Command::EmitPlots => unreachable!(),
    }
    Ok(Some(surface.scale()))
}

fn normalize_cmd(surface: &Surface, out: &mut Outputs) -> Result<(), CliError> {
    let cert = surface.certificate();
    let report = NormalizeReport {
        surface: surface.spec().clone(),
        scale: surface.scale(),
        second_form_bound: surface.second_form_bound(),
        curvature_bound: cert.curvature_bound,
        conjugate_radius: cert.conjugate_radius,
        chord_ratio: cert.chord_ratio,
        area: surface.area(),
    };
    write_toml(&out.path("normalize_report.toml"), &report)
}

fn shorten_cmd(surface: &Surface, config: &RunConfig, out: &mut Outputs) -> Result<(), CliError> {
    let path = config
        .input_curve
        .as_ref()
        .ok_or_else(|| CliError::Config(vec!["shorten needs input_curve (or --input)".into()]))?;
    let raw = read_curve(path)?;
    // Samples are pulled onto the surface so files written at reduced
    // precision or in original units still describe a curve in Λ.
    let projected = raw
        .samples()
        .iter()
        .map(|&p| surface.project(p).map(|q| q.0))
        .collect::<Result<Vec<_>, _>>()?;
    let curve = DiscreteCurve::from_parts(raw.l(), raw.m(), raw.speed(), projected)?;
    curve.check_lambda()?;
    let tol = config.shorten_tol * surface.scale();
    let (length0, energy0) = (curve.length(), curve.energy());
    match shorten_to_geodesic(surface, &curve, tol, config.max_iter) {
        Ok((result, trace)) => {
            write_shorten_trace(&out.path("shorten_trace.csv"), &trace)?;
            write_curve(&out.path("shortened_curve.csv"), &result)?;
            let report = ShortenReport {
                converged: trace.converged,
                collapsed: trace.collapsed,
                iterations: trace.iterations,
                final_residual: trace.final_residual,
                tolerance: tol,
                length_before: length0,
                length_after: result.length(),
                energy_before: energy0,
                energy_after: result.energy(),
                scale: surface.scale(),
            };
            write_toml(&out.path("shorten_report.toml"), &report)
        }
        Err(Error::MaxIterExceeded(PartialResult::Shortening(trace))) => {
            write_shorten_trace(&out.path("shorten_trace.csv"), &trace)?;
            Err(Error::MaxIterExceeded(PartialResult::Shortening(trace)).into())
        }
        Err(e) => Err(e.into()),
    }
}

/// One row per application of Ψ. The residual of the curve entering
/// iteration `k` is the distance it moved, so both columns agree.
fn write_shorten_trace(path: &Path, trace: &ShorteningTrace) -> Result<(), CliError> {
    let rows: Vec<Vec<String>> = trace
        .reports
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![(i + 1).to_string(), exact(r.length_after), exact(r.energy_after), exact(r.moved), exact(r.moved)]
        })
        .collect();
    write_table(path, &["iter", "length", "energy", "moved", "residual"], &rows)
}

fn write_width_trace(path: &Path, est: &WidthEstimate) -> Result<(), CliError> {
    let rows: Vec<Vec<String>> = est
        .per_iteration
        .iter()
        .map(|r| {
            vec![r.iteration.to_string(), exact(r.max_energy), r.argmax.to_string(), exact(r.max_adjacent_step)]
        })
        .collect();
    write_table(path, &["iter", "max_energy", "argmax", "max_adjacent_step"], &rows)
}

fn write_slice_profile(path: &Path, est: &WidthEstimate) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for (it, energies) in &est.checkpoints {
        let k = energies.len();
        for (i, e) in energies.iter().enumerate() {
            let t = -1.0 + 2.0 * i as f64 / (k - 1) as f64;
            rows.push(vec![it.to_string(), i.to_string(), exact(t), exact(*e)]);
        }
    }
    write_table(path, &["checkpoint", "slice", "t", "energy"], &rows)
}

/// Energy of the natural candidate for the width on oracle surfaces.
pub fn oracle_energy(surface: &Surface) -> Option<f64> {
    let s = surface.scale();
    match surface.kind() {
        SurfaceKind::Sphere => Some(TAU * s * s),
        SurfaceKind::Ellipsoid => {
            let a = surface.semi_axes()?;
            let pairs = [(a[0], a[1]), (a[0], a[2]), (a[1], a[2])];
            pairs.iter().map(|&(p, q)| ellipse_perimeter(p, q)).reduce(f64::min).map(|len| len * len / TAU)
        }
        SurfaceKind::PerturbedSphere => None,
    }
}

/// Perimeter by the periodic trapezoid rule, which converges geometrically
/// for the smooth integrand `√(a² sin² t + b² cos² t)`.
pub fn ellipse_perimeter(a: f64, b: f64) -> f64 {
    let n = 4096;
    let h = TAU / n as f64;
    (0..n)
        .map(|i| {
            let t = i as f64 * h;
            (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt()
        })
        .sum::<f64>()
        * h
}

struct Tightened {
    sweepout: Sweepout,
    report: TightenReport,
}

fn tighten_cmd(
    surface: &Surface,
    config: &RunConfig,
    exec: &RayonExecutor,
    out: &mut Outputs,
) -> Result<Tightened, CliError> {
    let initial = latitude_sweepout(surface, config.k, config.l, config.m)?;
    let initial = linearize_with(surface, &initial, exec)?;
    let degree_before = degree_value(surface, &initial);
    let initial_max = max_energy(&initial).1;
    let (sweepout, est) =
        match tighten_with(surface, &initial, config.max_iter, config.tolerances.stall_tol, exec) {
            Ok(v) => v,
            Err(Error::MaxIterExceeded(PartialResult::Tightening(est))) => {
                write_width_trace(&out.path("width_trace.csv"), &est)?;
                write_slice_profile(&out.path("slice_profile.csv"), &est)?;
                return Err(Error::MaxIterExceeded(PartialResult::Tightening(est)).into());
            }
            Err(e) => return Err(e.into()),
        };
    write_width_trace(&out.path("width_trace.csv"), &est)?;
    write_slice_profile(&out.path("slice_profile.csv"), &est)?;
    for p in write_sweepout(&config.output_dir.join("sweepout"), surface, &sweepout)? {
        out.record(&p);
    }
    let s2 = surface.scale() * surface.scale();
    let oracle = oracle_energy(surface);
    let report = TightenReport {
        width_upper: est.width_upper,
        width_upper_original_units: est.width_upper / s2,
        initial_max_energy: initial_max,
        argmax: max_energy(&sweepout).0,
        iterations: est.iterations(),
        converged: est.converged,
        stall_iteration: est.stall_iteration,
        degree_before,
        degree_after: degree_value(surface, &sweepout),
        oracle_energy: oracle,
        oracle_relative_error: oracle.map(|o| est.width_upper / o - 1.0),
    };
    if config.command == Some(Command::Tighten) {
        write_toml(&out.path("tighten_report.toml"), &report)?;
    }
    Ok(Tightened { sweepout, report })
}

fn near_max(
    surface: &Surface,
    sweepout: &Sweepout,
    width: f64,
    fraction: f64,
    exec: &RayonExecutor,
) -> Result<NearMaxReport, CliError> {
    let delta = fraction * width;
    let rep = near_max_slices_with(surface, sweepout, width, delta, exec)?;
    Ok(NearMaxReport {
        delta_fraction: fraction,
        delta,
        max_residual: rep.max_residual(),
        max_fit_distance: rep.best_fit_distance,
        indices: rep.indices,
        residuals: rep.residuals,
        fit_distances: rep.fit_distances,
    })
}

fn width_cmd(surface: &Surface, config: &RunConfig, exec: &RayonExecutor, out: &mut Outputs) -> Result<(), CliError> {
    let t = tighten_cmd(surface, config, exec, out)?;
    let width = t.report.width_upper;
    let trend = TREND_FRACTIONS
        .iter()
        .map(|&f| near_max(surface, &t.sweepout, width, f, exec))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Vec<String>> = trend
        .iter()
        .map(|r| {
            vec![
                exact(r.delta_fraction),
                exact(r.delta),
                r.indices.len().to_string(),
                exact(r.max_residual),
                r.max_fit_distance.map(exact).unwrap_or_default(),
            ]
        })
        .collect();
    write_table(
        &out.path("near_max.csv"),
        &["delta_fraction", "delta", "count", "max_residual", "max_fit_distance"],
        &rows,
    )?;
    let band = near_max(surface, &t.sweepout, width, config.near_max_fraction, exec)?;
    let report = WidthReport { tighten: t.report, near_max: band, trend };
    write_toml(&out.path("width_report.toml"), &report)
}

fn properties_cmd(
    surface: &Surface,
    config: &RunConfig,
    exec: &RayonExecutor,
    out: &mut Outputs,
) -> Result<(), CliError> {
    let n = config.property_samples;
    let p = SuiteParams { l: config.l, m: config.m, count: n, seed: config.seed };
    let (p3, p3_rows) = suites::property3(surface, p, exec)?;
    let outcomes = vec![
        suites::property1(surface, p, exec)?,
        suites::lemma_sc(surface, p, exec)?,
        suites::lemma_norm(surface, 10 * n, config.seed)?,
        suites::equivalence(surface, p, exec)?,
        suites::wirtinger(10 * n, config.seed)?,
        p3,
        suites::property4(surface, PROPERTY4_EPSILON, p)?,
        suites::continuity(surface, SuiteParams { count: CONTINUITY_CURVES.min(n), ..p }, exec)?,
        suites::degree_suite(surface, DEGREE_SLICES, config.l, DEGREE_SAMPLES, DEGREE_ITERATIONS, exec)?,
    ];
    let rows: Vec<Vec<String>> = outcomes
        .iter()
        .map(|o| {
            vec![
                o.suite.clone(),
                o.surface.clone(),
                o.cases.to_string(),
                o.violations.to_string(),
                exact(o.worst),
                o.passed().to_string(),
            ]
        })
        .collect();
    write_table(&out.path("properties.csv"), &["suite", "surface", "cases", "violations", "worst", "passed"], &rows)?;
    let p3_table: Vec<Vec<String>> = p3_rows
        .iter()
        .map(|r| vec![exact(r.drop_ratio), exact(r.moved_sq), exact(r.length_after), exact(r.bound)])
        .collect();
    write_table(&out.path("property3.csv"), &["drop_ratio", "moved_sq", "length_after", "bound"], &p3_table)?;
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.suite.clone()).collect();
    let report = PropertiesReport { passed: failed.is_empty(), outcomes };
    write_toml(&out.path("properties_report.toml"), &report)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::PropertyFailed(failed))
    }
}

//! End-to-end runs of the `bmm` binary.

use std::f64::consts::{SQRT_2, TAU};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bmm::io::{read_table, write_curve};
use bmm_core::{normalize, DiscreteCurve, SurfaceSpec, Vec3};

const SPHERE: &str = "[surface]\nkind = \"sphere\"\nparams = [1.0]\n";

fn bmm(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bmm"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path
}

fn toml_value(path: &Path) -> toml::Table {
    fs::read_to_string(path).unwrap().parse().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn normalize_reports_sphere_scale() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SPHERE);
    let out_dir = dir.path().join("out");
    let out = bmm(&["normalize", "--config", cfg.to_str().unwrap(), "--output", out_dir.to_str().unwrap()], &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = toml_value(&out_dir.join("normalize_report.toml"));
    let scale = report["scale"].as_float().unwrap();
    assert!((scale - 16.0 * SQRT_2).abs() < 1e-9);
    assert!(out_dir.join("run_report.toml").is_file());
}

fn great_circle_file(dir: &Path) -> PathBuf {
    let s = normalize(&SurfaceSpec::sphere(1.0)).unwrap();
    let r = s.scale();
    let c = DiscreteCurve::from_fn(32, 8, |x| Vec3::new(x.cos(), 0.0, x.sin()) * r).unwrap();
    let path = dir.join("circle.csv");
    write_curve(&path, &c).unwrap();
    path
}

#[test]
fn shorten_great_circle_then_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), &format!("l = 32\nm = 8\n{SPHERE}"));
    let input = great_circle_file(dir.path());
    let out_dir = dir.path().join("out");
    let o = out_dir.to_str().unwrap();
    let out = bmm(&["shorten", "--config", cfg.to_str().unwrap(), "--output", o, "--input", input.to_str().unwrap()], &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = toml_value(&out_dir.join("shorten_report.toml"));
    assert_eq!(report["converged"].as_bool(), Some(true));
    assert_eq!(report["iterations"].as_integer(), Some(1));

    let out = bmm(&["emit-plots", "--output", o], &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let (_, trace) = read_table(&out_dir.join("shorten_trace.csv")).unwrap();
    let (header, plot) = read_table(&out_dir.join("plots/energy_vs_iteration.csv")).unwrap();
    assert_eq!(header, ["iteration", "energy"]);
    assert_eq!(plot.len(), trace.len());
    for (p, t) in plot.iter().zip(&trace) {
        assert_eq!((&p[0], &p[1]), (&t[0], &t[2]));
    }
}

#[test]
fn small_width_run_emits_all_plots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), &format!("k = 9\nl = 32\nm = 4\nmax_iter = 20\n{SPHERE}"));
    let out_dir = dir.path().join("out");
    let o = out_dir.to_str().unwrap();
    let out = bmm(&["width", "--config", cfg.to_str().unwrap(), "--output", o, "--workers", "2"], &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = toml_value(&out_dir.join("width_report.toml"));
    let w = report["tighten"]["width_upper"].as_float().unwrap();
    let s = 16.0 * SQRT_2;
    assert!((w / (TAU * s * s) - 1.0).abs() < 0.01, "{w}");
    let out = bmm(&["emit-plots", "--output", o], &[]);
    assert_eq!(code(&out), 0);
    for name in ["energy_vs_iteration.csv", "slice_energy_profile.csv", "residual_vs_delta.csv"] {
        assert!(out_dir.join("plots").join(name).is_file(), "{name}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let o = out_dir.to_str().unwrap();

    assert_eq!(code(&bmm(&["normalize", "--output", o], &[])), 2);

    let bad = config(dir.path(), "[surface]\nkind = \"perturbed_sphere\"\nparams = [0.5]\n");
    assert_eq!(code(&bmm(&["normalize", "--config", bad.to_str().unwrap(), "--output", o], &[])), 2);

    let cfg = config(dir.path(), &format!("l = 32\nm = 8\nmax_iter = 1\n{SPHERE}"));
    let cfg = cfg.to_str().unwrap();
    let malformed = dir.path().join("bad.csv");
    fs::write(&malformed, "L,m,speed\n32,8,1.0\nx,y,z\n1,2,3\n").unwrap();
    let out = bmm(&["shorten", "--config", cfg, "--output", o, "--input", malformed.to_str().unwrap()], &[]);
    assert_eq!(code(&out), 2);
    assert!(out_dir.join("error_report.toml").is_file());

    let s = normalize(&SurfaceSpec::sphere(1.0)).unwrap();
    let wavy = DiscreteCurve::from_fn(32, 8, |x| {
        let u = Vec3::new(x.cos(), x.sin(), 0.2 * (3.0 * x).sin());
        s.chart(u / u.norm())
    })
    .unwrap();
    let wavy_path = dir.path().join("wavy.csv");
    write_curve(&wavy_path, &wavy).unwrap();
    let out = bmm(&["shorten", "--config", cfg, "--output", o, "--input", wavy_path.to_str().unwrap()], &[]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("shorten_trace.csv").is_file());

    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert_eq!(code(&bmm(&["emit-plots", "--output", empty.to_str().unwrap()], &[])), 3);
}

#[test]
fn environment_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SPHERE);
    let out_dir = dir.path().join("out");
    let out = bmm(
        &["normalize", "--config", cfg.to_str().unwrap(), "--output", out_dir.to_str().unwrap()],
        &[("BMM_SURFACE_KIND", "ellipsoid"), ("BMM_SURFACE_PARAMS", "[1.0, 1.1, 1.2]")],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = toml_value(&out_dir.join("normalize_report.toml"));
    assert_eq!(report["surface"]["kind"].as_str(), Some("ellipsoid"));
    assert!(report["scale"].as_float().unwrap() > 16.0 * SQRT_2);
}

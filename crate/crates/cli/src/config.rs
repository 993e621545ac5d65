//! Run configuration: a TOML file plus `BMM_*` environment overrides.

use std::path::{Path, PathBuf};

use bmm_core::{SurfaceSpec, Tolerances};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::CliError;

/// Prefix of environment overrides.
pub const ENV_PREFIX: &str = "BMM_";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Normalize,
    Shorten,
    Tighten,
    Width,
    CheckProperties,
    EmitPlots,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Normalize => "normalize",
            Command::Shorten => "shorten",
            Command::Tighten => "tighten",
            Command::Width => "width",
            Command::CheckProperties => "check-properties",
            Command::EmitPlots => "emit-plots",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceSpec,
    /// Half the number of partition nodes.
    #[serde(default = "defaults::l")]
    pub l: usize,
    /// Samples per partition interval.
    #[serde(default = "defaults::m")]
    pub m: usize,
    /// Slices per sweepout.
    #[serde(default = "defaults::k")]
    pub k: usize,
    #[serde(default = "defaults::max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "defaults::output_dir")]
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    /// Worker threads for slice-parallel work; all cores when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Curve CSV read by `shorten`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_curve: Option<PathBuf>,
    /// Residual at which `shorten` stops, in units of the scale.
    #[serde(default = "defaults::shorten_tol")]
    pub shorten_tol: f64,
    /// Near-max band reported by `width`, as a fraction of the width.
    #[serde(default = "defaults::near_max_fraction")]
    pub near_max_fraction: f64,
    /// Random samples per property suite.
    #[serde(default = "defaults::property_samples")]
    pub property_samples: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
}

mod defaults {
    use std::path::PathBuf;

    pub fn l() -> usize {
        64
    }
    pub fn m() -> usize {
        16
    }
    pub fn k() -> usize {
        65
    }
    pub fn max_iter() -> usize {
        500
    }
    pub fn output_dir() -> PathBuf {
        PathBuf::from("bmm-out")
    }
    pub fn shorten_tol() -> f64 {
        1e-6
    }
    pub fn near_max_fraction() -> f64 {
        0.01
    }
    pub fn property_samples() -> usize {
        100
    }
}

impl RunConfig {
    /// Defaults for every field except the surface.
    pub fn new(surface: SurfaceSpec) -> Self {
        Self {
            surface,
            l: defaults::l(),
            m: defaults::m(),
            k: defaults::k(),
            max_iter: defaults::max_iter(),
            seed: 0,
            output_dir: defaults::output_dir(),
            command: None,
            workers: None,
            input_curve: None,
            shorten_tol: defaults::shorten_tol(),
            near_max_fraction: defaults::near_max_fraction(),
            property_samples: defaults::property_samples(),
            tolerances: Tolerances::default(),
        }
    }

    /// Reads `path`, applies overrides from the process environment and
    /// validates the result.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(vec![format!("{}: {e}", path.display())]))?;
        Self::from_toml_with_env(&text, std::env::vars())
    }

    pub fn from_toml_with_env(
        text: &str,
        env: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self, CliError> {
        let mut table: Table = text.parse().map_err(|e| CliError::Config(vec![format!("{e}")]))?;
        apply_env(&mut table, env)?;
        let config: RunConfig = Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(vec![e.message().to_string()]))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Field-level checks that do not need a normalized surface.
    pub fn validate(&self) -> Result<(), CliError> {
        let mut bad = Vec::new();
        if self.l < 8 {
            bad.push(format!("l = {} must be at least 8", self.l));
        }
        if self.m < 4 {
            bad.push(format!("m = {} must be at least 4", self.m));
        }
        if self.k < 9 || self.k % 2 == 0 {
            bad.push(format!("k = {} must be odd and at least 9", self.k));
        }
        if self.max_iter == 0 {
            bad.push("max_iter must be positive".into());
        }
        if self.workers == Some(0) {
            bad.push("workers must be positive".into());
        }
        if !(self.shorten_tol > 0.0 && self.shorten_tol.is_finite()) {
            bad.push("shorten_tol must be positive".into());
        }
        if !(self.near_max_fraction > 0.0 && self.near_max_fraction.is_finite()) {
            bad.push("near_max_fraction must be positive".into());
        }
        if self.property_samples == 0 {
            bad.push("property_samples must be positive".into());
        }
        for field in self.tolerances.invalid_fields() {
            bad.push(format!("tolerances.{field} must be positive"));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(bad))
        }
    }
}

/// Maps `BMM_SURFACE_KIND` to `surface.kind`, `BMM_TOLERANCES_TOL_GEO` to
/// `tolerances.tol_geo` and `BMM_MAX_ITER` to `max_iter`. Values are parsed as
/// TOML and fall back to plain strings.
fn apply_env(table: &mut Table, env: impl IntoIterator<Item = (String, String)>) -> Result<(), CliError> {
    let mut vars: Vec<(String, String)> =
        env.into_iter().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
    vars.sort();
    for (name, raw) in vars {
        let key = name[ENV_PREFIX.len()..].to_ascii_lowercase();
        let value = parse_value(&raw);
        let (section, field) = ["surface", "tolerances"]
            .iter()
            .find_map(|s| key.strip_prefix(&format!("{s}_")).map(|f| (Some(*s), f.to_string())))
            .unwrap_or((None, key.clone()));
        match section {
            Some(s) => {
                let entry = table.entry(s).or_insert_with(|| Value::Table(Table::new()));
                match entry {
                    Value::Table(t) => {
                        t.insert(field, value);
                    }
                    _ => return Err(CliError::Config(vec![format!("{name}: `{s}` is not a table")])),
                }
            }
            None => {
                table.insert(field, value);
            }
        }
    }
    Ok(())
}

fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "[surface]\nkind = \"sphere\"\nparams = [1.0]\n";

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::from_toml_with_env(BASE, []).unwrap();
        assert_eq!((c.l, c.m, c.k, c.max_iter, c.seed), (64, 16, 65, 500, 0));
        assert_eq!(c.surface, SurfaceSpec::sphere(1.0));
    }

    #[test]
    fn environment_overrides() {
        let env = [
            ("BMM_MAX_ITER".to_string(), "7".to_string()),
            ("BMM_SURFACE_KIND".to_string(), "ellipsoid".to_string()),
            ("BMM_SURFACE_PARAMS".to_string(), "[1.0, 1.1, 1.2]".to_string()),
            ("BMM_TOLERANCES_TOL_GEO".to_string(), "1e-9".to_string()),
            ("BMM_OUTPUT_DIR".to_string(), "/tmp/x y".to_string()),
            ("OTHER".to_string(), "1".to_string()),
        ];
        let c = RunConfig::from_toml_with_env(BASE, env).unwrap();
        assert_eq!(c.max_iter, 7);
        assert_eq!(c.surface, SurfaceSpec::ellipsoid(1.0, 1.1, 1.2));
        assert_eq!(c.tolerances.tol_geo, 1e-9);
        assert_eq!(c.output_dir, PathBuf::from("/tmp/x y"));
    }

    #[test]
    fn field_errors_are_listed() {
        let text = format!("l = 4\nk = 10\n{BASE}[tolerances]\ntol_geo = -1.0\n");
        let Err(CliError::Config(msgs)) = RunConfig::from_toml_with_env(&text, []) else {
            panic!("expected a config error");
        };
        assert_eq!(msgs.len(), 3, "{msgs:?}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("speed = 3\n{BASE}");
        assert!(matches!(RunConfig::from_toml_with_env(&text, []), Err(CliError::Config(_))));
    }

    #[test]
    fn round_trip() {
        let mut c = RunConfig::new(SurfaceSpec::perturbed_sphere(0.05));
        c.command = Some(Command::Width);
        c.workers = Some(3);
        c.tolerances.stall_tol = 2e-7;
        let back = RunConfig::from_toml_with_env(&c.to_toml(), []).unwrap();
        assert_eq!(back, c);
    }
}

//! Structured reports written next to the trace CSVs.

use serde::Serialize;

use crate::config::RunConfig;
use crate::suites::SuiteOutcome;

/// Written to `run_report.toml` after every successful run.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub version: String,
    pub command: String,
    pub scale: Option<f64>,
    pub wall_time_seconds: f64,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
    pub config: RunConfig,
}

/// Written to `error_report.toml` when a run fails.
#[derive(Clone, Debug, Serialize)]
pub struct ErrorReport {
    pub version: String,
    pub command: String,
    pub kind: String,
    pub exit_code: i32,
    pub message: String,
    pub details: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalizeReport {
    pub surface: bmm_core::SurfaceSpec,
    pub scale: f64,
    pub second_form_bound: f64,
    pub curvature_bound: f64,
    pub conjugate_radius: f64,
    pub chord_ratio: f64,
    pub area: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShortenReport {
    pub converged: bool,
    pub collapsed: bool,
    pub iterations: usize,
    pub final_residual: f64,
    pub tolerance: f64,
    pub length_before: f64,
    pub length_after: f64,
    pub energy_before: f64,
    pub energy_after: f64,
    pub scale: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TightenReport {
    /// Maximal slice energy of the tightened sweepout. Tightening one
    /// sweepout can only bound the width from above.
    pub width_upper: f64,
    /// `width_upper / scale²`, in the units of the input surface.
    pub width_upper_original_units: f64,
    pub initial_max_energy: f64,
    pub argmax: usize,
    pub iterations: usize,
    pub converged: bool,
    pub stall_iteration: Option<usize>,
    pub degree_before: f64,
    pub degree_after: f64,
    /// Energy of the analytic candidate on oracle surfaces: `2πs²` on a sphere,
    /// the shortest principal ellipse on an ellipsoid.
    pub oracle_energy: Option<f64>,
    pub oracle_relative_error: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NearMaxReport {
    pub delta_fraction: f64,
    pub delta: f64,
    pub indices: Vec<usize>,
    pub residuals: Vec<f64>,
    pub fit_distances: Option<Vec<f64>>,
    pub max_residual: f64,
    pub max_fit_distance: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WidthReport {
    pub tighten: TightenReport,
    pub near_max: NearMaxReport,
    pub trend: Vec<NearMaxReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertiesReport {
    pub passed: bool,
    pub outcomes: Vec<SuiteOutcome>,
}

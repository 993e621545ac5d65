use alloc::boxed::Box;
use alloc::string::String;

use crate::shortening::ShorteningTrace;
use crate::sweepout::WidthEstimate;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong in the numerical core.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("invalid surface spec: {0}")]
    InvalidSpec(String),
    #[error("perturbation too large: {0}")]
    PerturbationTooLarge(String),
    #[error("nearest-point projection did not converge (residual {residual:e})")]
    ProjectionDiverged { residual: f64 },
    #[error("geodesic integrator could not reach tolerance {tol:e}")]
    StepSizeUnderflow { tol: f64 },
    #[error("geodesic shooting diverged (endpoint miss {miss:e})")]
    ShootingDiverged { miss: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("curve speed {speed} exceeds the Lipschitz bound {bound}")]
    LipschitzExceeded { speed: f64, bound: f64 },
    #[error("partition sub-arc of length {arc} exceeds 2π")]
    SegmentTooLong { arc: f64 },
    #[error("curves live on different parameter grids")]
    GridMismatch,
    #[error("sampled function does not vanish at the endpoints")]
    EndpointNotZero,
    #[error("iteration limit reached without convergence")]
    MaxIterExceeded(PartialResult),
    #[error("rejection sampling failed {attempts} times in a row")]
    SamplingExhausted { attempts: usize },
    #[error("samples are rank deficient; no plane fit exists")]
    DegenerateFit,
    #[error("discrete degree {value} is not within 0.1 of an integer")]
    DegreeAmbiguous { value: f64 },
    #[error("operation requires {0}")]
    UnsupportedSurface(&'static str),
}

/// Diagnostics carried by [`Error::MaxIterExceeded`].
#[derive(Debug, Clone)]
pub enum PartialResult {
    Shortening(Box<ShorteningTrace>),
    Tightening(Box<WidthEstimate>),
}

use std::path::PathBuf;

/// Failures of a run, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("malformed input {path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error("{0}")]
    Numerical(bmm_core::Error),
    #[error("property suites failed: {}", .0.join(", "))]
    PropertyFailed(Vec<String>),
    #[error("no trace files in {0}")]
    MissingTrace(PathBuf),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Format { .. } => 2,
            CliError::Numerical(bmm_core::Error::MaxIterExceeded(_)) => 4,
            CliError::Io { .. }
            | CliError::Numerical(_)
            | CliError::PropertyFailed(_)
            | CliError::MissingTrace(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Format { .. } => "format",
            CliError::Io { .. } => "io",
            CliError::Numerical(bmm_core::Error::MaxIterExceeded(_)) => "non-convergence",
            CliError::Numerical(_) => "numerical",
            CliError::PropertyFailed(_) => "property",
            CliError::MissingTrace(_) => "missing-trace",
        }
    }

    pub(crate) fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

impl From<bmm_core::Error> for CliError {
    fn from(e: bmm_core::Error) -> Self {
        match e {
            bmm_core::Error::InvalidSpec(m) => CliError::Config(vec![format!("surface: {m}")]),
            bmm_core::Error::PerturbationTooLarge(m) => {
                CliError::Config(vec![format!("surface: perturbation too large: {m}")])
            }
            other => CliError::Numerical(other),
        }
    }
}

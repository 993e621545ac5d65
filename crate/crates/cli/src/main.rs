use std::path::PathBuf;
use std::process::ExitCode;

use bmm::config::{Command, RunConfig};
use bmm::{run, CliError};
use clap::Parser;

/// Birkhoff curve shortening, sweepout tightening and min-max width estimates.
#[derive(Debug, Parser)]
#[command(name = "bmm", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration. Optional for emit-plots.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output_dir`.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for slice-parallel work.
    #[arg(long)]
    workers: Option<usize>,
    /// Curve CSV for shorten; overrides `input_curve`.
    #[arg(long)]
    input: Option<PathBuf>,
}

fn load(args: &Args) -> Result<RunConfig, CliError> {
    let mut config = match (&args.config, args.command) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Command::EmitPlots) => RunConfig::new(bmm_core::SurfaceSpec::sphere(1.0)),
        (None, _) => return Err(CliError::Config(vec!["--config is required".into()])),
    };
    config.command = Some(args.command);
    if let Some(dir) = &args.output {
        config.output_dir = dir.clone();
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if args.workers.is_some() {
        config.workers = args.workers;
    }
    if args.input.is_some() {
        config.input_curve = args.input.clone();
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = load(&args).and_then(|c| run(&c));
    match result {
        Ok(report) => {
            println!("{}: wrote {} files to {}", report.command, report.outputs.len(), report.config.output_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

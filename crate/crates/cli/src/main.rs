//! Batch driver: reads one JSON configuration, runs the experiment it
//! describes and writes CSV and JSON results plus a checksummed manifest.

mod config;
mod error;
mod experiments;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{sha256_hex, OutputDir};

#[derive(Debug, Parser)]
#[command(
    name = "betaplane",
    version,
    about = "Wind-driven equatorial ocean experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a configuration against every hypothesis it relies on.
    Validate(RunArgs),
    /// Build the stationary solution and measure its residuals.
    Stationary(RunArgs),
    /// Residual and size scalings over a ladder of Rossby numbers.
    ResidualStudy(RunArgs),
    /// Propagate a Rossby wave packet.
    Rossby(RunArgs),
    /// Trace Poincaré rays with their damping weights.
    PoincareRays(RunArgs),
    /// Temperature convergence study.
    Thermocline(RunArgs),
    /// Dimensionless numbers from physical scales.
    Scales(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
}

impl Command {
    fn parts(&self) -> (&'static str, &RunArgs) {
        match self {
            Self::Validate(a) => ("validate", a),
            Self::Stationary(a) => ("stationary", a),
            Self::ResidualStudy(a) => ("residual-study", a),
            Self::Rossby(a) => ("rossby", a),
            Self::PoincareRays(a) => ("poincare-rays", a),
            Self::Thermocline(a) => ("thermocline", a),
            Self::Scales(a) => ("scales", a),
        }
    }
}

fn load(path: &Path) -> Result<(RunConfig, String), CliError> {
    let text = fs::read(path)?;
    let config = serde_json::from_slice(&text).map_err(|e| CliError::Config(e.to_string()))?;
    Ok((config, sha256_hex(&text)))
}

fn execute(name: &str, args: &RunArgs) -> Result<(), CliError> {
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::Config("`--threads` must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let (config, digest) = load(&args.config)?;
    let mut out = OutputDir::create(&args.out)?;
    if name == "validate" {
        let reports = experiments::validate(&config)?;
        out.json("validation.json", config.kind(), &reports)?;
    } else {
        if config.kind() != name {
            return Err(CliError::Config(format!(
                "configuration describes a `{}` experiment, not `{name}`",
                config.kind()
            )));
        }
        experiments::run(&config, &mut out)?;
    }
    out.finish(name, &digest)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = cli.command.parts();
    match execute(name, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report =
                serde_json::to_string_pretty(&e.report()).unwrap_or_else(|_| e.to_string());
            eprintln!("{report}");
            if fs::create_dir_all(&args.out).is_ok() {
                let _ = fs::write(args.out.join("error.json"), format!("{report}\n"));
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

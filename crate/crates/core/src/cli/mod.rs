//! Command-line front end.
//!
//! Exit status: 0 success, 1 validation failure, 2 configuration or argument
//! error, 3 domain or geometry error, 4 quadrature failure, 5 I/O error.

pub mod commands;
pub mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::Outcome;
pub use config::{OutputFormat, RunConfig};

use crate::error::{Error, Result};
use crate::phase::QuadratureSettings;
use crate::scan::{Engine, Spacing, SweptParameter};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "AB_CONTRAST_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ab-contrast", version, about = "Interference contrast of a two-path electron interferometer in an oscillating field")]
pub struct Cli {
    /// JSON run configuration; defaults to the built-in benchmark.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Relative tolerance of the phase quadrature.
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,

    /// Minimum time panels per field period.
    #[arg(long, global = true)]
    pub min_samples_per_period: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Numeric,
    ClosedForm,
    Both,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Numeric => Engine::Numeric,
            EngineArg::ClosedForm => Engine::ClosedForm,
            EngineArg::Both => Engine::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepArg {
    Amplitude,
    Flux,
    Wavelength,
    HalfSeparation,
    BeamWidth,
}

impl From<SweepArg> for SweptParameter {
    fn from(s: SweepArg) -> Self {
        match s {
            SweepArg::Amplitude => SweptParameter::Amplitude,
            SweepArg::Flux => SweptParameter::Flux,
            SweepArg::Wavelength => SweptParameter::Wavelength,
            SweepArg::HalfSeparation => SweptParameter::HalfSeparation,
            SweepArg::BeamWidth => SweptParameter::BeamWidth,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpacingArg {
    Linear,
    Log,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// |C| and the contrast estimates for the configured scenario.
    Contrast {
        #[arg(long, value_enum, default_value = "numeric")]
        engine: EngineArg,
    },
    /// Sweep one parameter and report contrast zeros and revivals.
    Scan {
        #[arg(long, value_enum)]
        sweep: SweepArg,
        /// lo:hi in the parameter's lab unit (V/m, W/cm², μm).
        #[arg(long)]
        range: String,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long, value_enum, default_value = "linear")]
        spacing: SpacingArg,
        #[arg(long, value_enum, default_value = "numeric")]
        engine: EngineArg,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
    },
    /// Check the quadrature engine against closed forms and oracles.
    Validate,
    /// Thomson mean free path and scattering estimate.
    Mfp {
        /// Intensity in W/cm².
        #[arg(long)]
        flux: Option<f64>,
        /// Wavelength in μm.
        #[arg(long)]
        wavelength: Option<f64>,
    },
    /// Evaluate one closed-form expression on the configured scenario.
    Eval { name: String },
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => 2,
        Error::Domain(_) | Error::Construction(_) | Error::UnsupportedGeometry(_) | Error::StaticField { .. } => 3,
        Error::Quadrature { .. } => 4,
        Error::Io(_) => 5,
    }
}

fn settings(cli: &Cli, config: &RunConfig) -> QuadratureSettings {
    let mut s = config.settings();
    if let Some(t) = cli.rel_tol {
        s.relative_tolerance = t;
    }
    if let Some(n) = cli.min_samples_per_period {
        s.min_samples_per_period = n;
    }
    s
}

/// Runs a parsed command line against the given streams.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let settings = settings(cli, &config);
    match &cli.command {
        Command::Contrast { engine } => commands::cmd_contrast(&config, &settings, (*engine).into(), out),
        Command::Scan {
            sweep,
            range,
            points,
            spacing,
            engine,
            output,
            format,
        } => {
            let (lo, hi) = commands::parse_range(range)?;
            let block = config.output.clone().unwrap_or_default();
            let args = commands::ScanArgs {
                sweep: (*sweep).into(),
                lo,
                hi,
                points: *points,
                spacing: match spacing {
                    SpacingArg::Linear => Spacing::Linear,
                    SpacingArg::Log => Spacing::Log,
                },
                engine: (*engine).into(),
                output: output.clone().or(block.path),
                format: format.or(block.format).unwrap_or_default(),
            };
            commands::cmd_scan(&config, &settings, &args, out, err)
        }
        Command::Validate => commands::cmd_validate(&config, &settings, out),
        Command::Mfp { flux, wavelength } => commands::cmd_mfp(&config, *flux, *wavelength, out),
        Command::Eval { name } => commands::cmd_eval(&config, name, out),
    }
}

/// Configures the global thread pool from [`THREADS_ENV`].
pub fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
    if n == 0 {
        return Err(Error::Config(format!("{THREADS_ENV} must be positive")));
    }
    // a pool built earlier in the process keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Entry point for the binary. Returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let result = init_threads().and_then(|_| run(&cli, &mut stdout.lock(), &mut stderr.lock()));
    match result {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::ValidationFailed) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

//! `qsearch` command-line front end.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qsearch::SearchError;

pub mod commands;
pub mod params;
pub mod verify;

pub use params::{ParamArgs, ParamSet};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or parameter values; exit code 2.
    Usage(String),
    /// An invariant check failed; exit code 1.
    VerificationFailed(usize),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::VerificationFailed(n) => write!(f, "{n} verification check(s) failed"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Analog quantum search: Hamiltonians, measuring times and traces.
#[derive(Debug, Parser)]
#[command(name = "qsearch", version)]
pub struct Cli {
    /// Output format (default: json for time/convert/verify, csv for trace/sweep)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to PATH instead of standard output
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Seed for randomized verification
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact first measuring time and schedule
    Time(ParamArgs),
    /// Marked-state probability and amplitudes over time
    Trace(TraceArgs),
    /// t_first and timing tolerance over a parameter grid
    Sweep(SweepArgs),
    /// Convert between the spectral and coupling parameterizations
    Convert(ParamArgs),
    /// Run the randomized invariant suite
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// End of the sampled interval (default: two periods, 2*pi/E_o)
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of samples, both endpoints included
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// Integrate with fixed-step RK4 instead of the exact propagator
    #[arg(long)]
    pub numeric: bool,
    /// RK4 step (needs dt * E_o <= 0.05)
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Swept parameter as name:start:stop:steps (closed grid); give once or twice
    #[arg(
        long = "sweep",
        required = true,
        value_name = "NAME:START:STOP:STEPS",
        allow_hyphen_values = true
    )]
    pub axes: Vec<String>,
    /// Probability threshold for the timing tolerance column
    #[arg(long, default_value_t = 0.99)]
    pub p_threshold: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Number of random parameter draws per check
    #[arg(long, default_value_t = 200)]
    pub draws: usize,
    /// Also integrate the full N-item space and compare with the two-level curve
    #[arg(long)]
    pub full_space: bool,
    /// Number of items for --full-space
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Number of marked items for --full-space
    #[arg(long, default_value_t = 2)]
    pub m: usize,
}

/// Formats a double with the shortest representation that round-trips,
/// switching to exponent notation for very small or very large magnitudes.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let result = match &cli.command {
        Command::Time(args) => {
            commands::cmd_time(args, cli.format.unwrap_or(Format::Json), &mut sink)
        }
        Command::Trace(args) => {
            commands::cmd_trace(args, cli.format.unwrap_or(Format::Csv), &mut sink)
        }
        Command::Sweep(args) => {
            commands::cmd_sweep(args, cli.format.unwrap_or(Format::Csv), &mut sink)
        }
        Command::Convert(args) => {
            commands::cmd_convert(args, cli.format.unwrap_or(Format::Json), &mut sink)
        }
        Command::Verify(args) => verify::cmd_verify(
            args,
            cli.seed,
            cli.format.unwrap_or(Format::Json),
            &mut sink,
        ),
    };
    sink.flush()?;
    result
}

//! Command-line front end: argument handling, run manifests and file output
//! for the `econ_entropy` analyses and simulations.

pub mod config;
pub mod ingest;
pub mod manifest;
pub mod output;

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use ingest::{parse_macro_csv, IngestError};
pub use manifest::RunManifest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

const SUBCOMMANDS: [&str; 5] = ["macro", "ca1d", "schelling", "exchange", "consumer"];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => EXIT_USAGE,
            CliError::Ingest(_) | CliError::Data(_) | CliError::Io { .. } => EXIT_DATA,
        }
    }

    fn usage(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }

    fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "econ-entropy",
    version,
    about = "Entropy accounting for macro series and entropy traces of lattice and exchange simulations",
    args_conflicts_with_subcommands = true
)]
pub struct Cli {
    /// Re-run the run recorded in a manifest file
    #[arg(long, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
    /// With --manifest, write the outputs under DIR instead of the recorded location
    #[arg(long, value_name = "DIR", requires = "manifest")]
    pub replay_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Production entropy and elasticity report for a macro series CSV
    #[command(args_override_self = true)]
    Macro(MacroArgs),
    /// Elementary cellular automaton space-time diagram
    #[command(args_override_self = true)]
    Ca1d(Ca1dArgs),
    /// Schelling segregation run with a satisfaction entropy trace
    #[command(args_override_self = true)]
    Schelling(SchellingArgs),
    /// Random money-exchange game with wealth histogram and exponential fit
    #[command(args_override_self = true)]
    Exchange(ExchangeArgs),
    /// Consumer lattice with a growing Preferred region
    #[command(args_override_self = true)]
    Consumer(ConsumerArgs),
}

/// Shared by every subcommand; consumed before parsing.
#[derive(Debug, Args)]
pub struct ConfigArg {
    /// Read `key = value` defaults from FILE; command-line flags take precedence
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Run this many consecutive seeds, each into OUT_DIR/seed-<seed>
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub replicas: u64,
    /// Worker threads for --replicas
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
}

#[derive(Debug, Args)]
pub struct MacroArgs {
    /// Series CSV with header period,E,V,W[,N][,alpha]
    #[arg(long)]
    pub input: PathBuf,
    /// Report CSV to write
    #[arg(long, default_value = "report.csv")]
    pub output: PathBuf,
    #[command(flatten)]
    pub config: ConfigArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeedPattern {
    Single,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Boundary1 {
    Toroidal,
    FixedZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Boundary2 {
    Toroidal,
    Bounded,
}

#[derive(Debug, Args)]
pub struct Ca1dArgs {
    /// Wolfram rule number, 0..=255
    #[arg(long, allow_negative_numbers = true)]
    pub rule: i64,
    #[arg(long, default_value_t = 257)]
    pub width: usize,
    #[arg(long, default_value_t = 128)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = SeedPattern::Single)]
    pub seed_pattern: SeedPattern,
    #[arg(long, value_enum, default_value_t = Boundary1::Toroidal)]
    pub boundary: Boundary1,
    /// Seed for --seed-pattern random; generated and printed when omitted
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub config: ConfigArg,
}

#[derive(Debug, Args)]
pub struct SchellingArgs {
    #[arg(long, default_value_t = 20)]
    pub width: usize,
    #[arg(long, default_value_t = 20)]
    pub height: usize,
    /// Fraction of cells occupied by agents
    #[arg(long, default_value_t = 0.9)]
    pub density: f64,
    /// Fraction of agents of type A
    #[arg(long, default_value_t = 0.5)]
    pub split: f64,
    /// Most unlike neighbors an agent accepts
    #[arg(long, default_value_t = 3)]
    pub tolerance: usize,
    #[arg(long, default_value_t = 1)]
    pub radius: usize,
    /// Generated and printed when omitted
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 200)]
    pub max_sweeps: u64,
    /// Snapshot every K sweeps; 0 keeps only the first and last grids
    #[arg(long, default_value_t = 0)]
    pub snapshot_every: u64,
    #[arg(long, value_enum, default_value_t = Boundary2::Toroidal)]
    pub boundary: Boundary2,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub config: ConfigArg,
}

#[derive(Debug, Args)]
pub struct ExchangeArgs {
    #[arg(long, default_value_t = 1000)]
    pub players: usize,
    /// Initial money per player
    #[arg(long, default_value_t = 100.0)]
    pub initial: f64,
    /// Money moved per play
    #[arg(long, default_value_t = 1.0)]
    pub delta_m: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub steps: u64,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
    /// Generated and printed when omitted
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sample the entropy every K plays instead of ten times per decade
    #[arg(long)]
    pub trace_stride: Option<u64>,
    /// Give all the money to player 0 at the start
    #[arg(long)]
    pub concentrated: bool,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub config: ConfigArg,
}

#[derive(Debug, Args)]
pub struct ConsumerArgs {
    /// Lattice rows
    #[arg(long, default_value_t = 16)]
    pub price_levels: usize,
    /// Lattice columns
    #[arg(long, default_value_t = 16)]
    pub good_levels: usize,
    #[arg(long, default_value_t = 3)]
    pub tolerance: usize,
    #[arg(long, default_value_t = 1)]
    pub radius: usize,
    #[arg(long, default_value_t = 0.8)]
    pub density: f64,
    #[arg(long, default_value_t = 0.5)]
    pub split: f64,
    #[arg(long, default_value_t = 135)]
    pub steps: u64,
    /// Generated and printed when omitted
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated steps at which to write PPM snapshots
    #[arg(long, value_delimiter = ',', default_value = "57,70,91,135")]
    pub snapshot_steps: Vec<u64>,
    /// Column of the initial Preferred cell
    #[arg(long, default_value_t = 0)]
    pub rent_x: usize,
    /// Row of the initial Preferred cell
    #[arg(long, default_value_t = 0)]
    pub rent_y: usize,
    #[arg(long, default_value_t = 1.0)]
    pub gibbs_delta_m: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gibbs_initial: f64,
    /// Skip the two-player lottery layer
    #[arg(long)]
    pub no_lottery: bool,
    #[arg(long, value_enum, default_value_t = Boundary2::Toroidal)]
    pub boundary: Boundary2,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub config: ConfigArg,
}

/// Run the CLI on `argv` (program name first) against the process streams.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    dispatch_to(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`dispatch`] with explicit output streams.
pub fn dispatch_to<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<String> = argv
        .into_iter()
        .map(|a| a.into().to_string_lossy().into_owned())
        .collect();
    match parse_and_run(argv, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn parse_and_run(
    argv: Vec<String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let argv = config::expand(argv, &SUBCOMMANDS)?;
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return Ok(if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{rendered}");
                EXIT_OK
            });
        }
    };
    match (cli.manifest, cli.command) {
        (Some(path), _) => commands::replay(&path, cli.replay_dir.as_deref(), out, err)?,
        (None, Some(command)) => commands::run(command, out)?,
        (None, None) => {
            return Err(CliError::Usage(
                "a subcommand or --manifest is required (see --help)".into(),
            ))
        }
    }
    Ok(EXIT_OK)
}

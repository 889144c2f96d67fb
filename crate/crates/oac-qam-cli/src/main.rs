//! Command-line front end: design constellations, evaluate the closed
//! forms, run Monte-Carlo SNR sweeps, and validate the numerical pipeline.
//!
//! Exit codes: 0 success, 2 usage error, 3 domain error, 4 I/O error,
//! 5 validation failure.

mod commands;
mod validate;

use clap::{Args, Parser, Subcommand, ValueEnum};
use oac_qam::simulator::{EqualSpacingBaseline, SymbolMode};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "oac-qam",
    version,
    about = "QAM-like constellation design for over-the-air sum computation under Cauchy noise"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design the MSE-optimal spacing split for one channel condition.
    Optimize(OptimizeArgs),
    /// Evaluate the closed-form MSE of candidate designs.
    Mse(MseArgs),
    /// Monte-Carlo MSE sweep over an SNR grid; writes a plot-ready table.
    Sweep(SweepArgs),
    /// Run the cross-module validation suite.
    Validate(ValidateArgs),
}

/// Channel and constellation inputs shared by optimize/mse.
#[derive(Args)]
struct ChannelArgs {
    /// Number of transmitters K.
    #[arg(long)]
    k: u64,
    /// Per-axis alphabet size q (inputs live in [0, q^2 - 1]).
    #[arg(long)]
    q: u64,
    /// Average power budget P.
    #[arg(long, default_value_t = 1.0)]
    power: f64,
    /// Cauchy noise scale gamma (alternative to --snr-db).
    #[arg(long, conflicts_with = "snr_db")]
    gamma: Option<f64>,
    /// SNR in dB: 10*log10(P/gamma); with P=1 this is 1/gamma in dB.
    #[arg(long)]
    snr_db: Option<f64>,
}

impl ChannelArgs {
    fn gamma(&self) -> Result<f64, CliError> {
        match (self.gamma, self.snr_db) {
            (Some(g), None) => Ok(g),
            (None, Some(db)) => Ok(self.power / 10f64.powf(db / 10.0)),
            (None, None) => Err(CliError::Domain(
                "one of --gamma or --snr-db is required".into(),
            )),
            (Some(_), Some(_)) => unreachable!("clap rejects the conflict"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    PerNodeUniform,
    UniformGrid,
}

impl From<ModeArg> for SymbolMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::PerNodeUniform => SymbolMode::PerNodeUniform,
            ModeArg::UniformGrid => SymbolMode::UniformGrid,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineArg {
    PowerMatched,
    Caption,
}

impl From<BaselineArg> for EqualSpacingBaseline {
    fn from(b: BaselineArg) -> Self {
        match b {
            BaselineArg::PowerMatched => EqualSpacingBaseline::PowerMatched,
            BaselineArg::Caption => EqualSpacingBaseline::Caption,
        }
    }
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// Equal-spacing reference to compare against.
    #[arg(long, value_enum, default_value_t = BaselineArg::PowerMatched)]
    baseline: BaselineArg,
    /// Write a machine-readable JSON record of the design here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MseArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// Equal-spacing reference to include.
    #[arg(long, value_enum, default_value_t = BaselineArg::PowerMatched)]
    baseline: BaselineArg,
    /// Evaluate an explicit in-phase spacing (requires --d2).
    #[arg(long, requires = "d2")]
    d1: Option<f64>,
    /// Evaluate an explicit quadrature spacing (requires --d1).
    #[arg(long, requires = "d1")]
    d2: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Number of transmitters K.
    #[arg(long)]
    k: u64,
    /// Per-axis alphabet size q.
    #[arg(long)]
    q: u64,
    /// Average power budget P.
    #[arg(long, default_value_t = 1.0)]
    power: f64,
    /// First SNR point in dB.
    #[arg(long, default_value_t = 0.0)]
    snr_start: f64,
    /// Last SNR point in dB.
    #[arg(long, default_value_t = 20.0)]
    snr_stop: f64,
    /// SNR grid step in dB.
    #[arg(long, default_value_t = 1.0)]
    snr_step: f64,
    /// Monte-Carlo trials per SNR point and design.
    #[arg(long, default_value_t = 50_000)]
    trials: u64,
    /// Seed for all randomness in the sweep.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Symbol drawing mode.
    #[arg(long, value_enum, default_value_t = ModeArg::PerNodeUniform)]
    mode: ModeArg,
    /// Equal-spacing baseline convention.
    #[arg(long, value_enum, default_value_t = BaselineArg::PowerMatched)]
    baseline: BaselineArg,
    /// Worker threads (0 = library default). Must not change any number.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output data file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Reduced trial counts with correspondingly wider tolerances.
    #[arg(long)]
    quick: bool,
    /// Seed for the Monte-Carlo checks.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Worker threads (0 = library default).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Deliberately corrupt the closed form to prove the harness notices.
    #[arg(long)]
    self_test_fault: bool,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0} validation check(s) failed")]
    Validation(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Validation(_) => 5,
        }
    }
}

impl From<oac_qam::Error> for CliError {
    fn from(e: oac_qam::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

/// Run `f` on a pool with the requested number of workers (0 = default).
fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Domain(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Optimize(args) => commands::optimize(args),
        Command::Mse(args) => commands::mse(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Validate(args) => validate::run(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! ratekit: sum rates of cooperative and multihop schemes in dense
//! wireless grid networks. Subcommands evaluate single operating points,
//! reproduce the named result figures as CSV, sweep one parameter axis,
//! or run seeded verification suites.

mod compute;
mod config;
mod figures;
mod output;
mod sweep;
mod verify;

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ratekit::coding::RelayScheme;
use ratekit::schemes::{ConstantVariant, Method};

use config::{
    parse_constants, parse_count, parse_method, parse_positive, parse_range, parse_scheme,
    resolve, ConfigError, RangeSpec,
};
use output::OutputFormat;

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Pathloss exponent (default 7)
    #[arg(long)]
    alpha: Option<f64>,

    /// Node count; scientific shorthand like 1e5 accepted (default 1e4)
    #[arg(long, value_parser = parse_count)]
    n: Option<u64>,

    /// Node-count grid LO:HI:POINTS, geometric spacing
    #[arg(long = "n-range", value_parser = parse_range)]
    n_range: Option<RangeSpec>,

    /// Scheme(s): single-stage, m1..m4, multihop, original-hc
    /// (comma separated; "single" is accepted for single-stage)
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    method: Vec<Method>,

    /// Expansion factor; hierarchical searches try {1, 2} when unset
    #[arg(long)]
    q: Option<u32>,

    /// Fixed stage count for hierarchical schemes (1..=8)
    #[arg(long)]
    t: Option<usize>,

    /// Stage-search bound for hierarchical schemes (default 8)
    #[arg(long)]
    tmax: Option<usize>,

    /// Reuse-factor override (default: chosen from the SNR)
    #[arg(long = "L")]
    l: Option<u32>,

    /// Transmit-SNR override, linear scale (default: alpha-optimal;
    /// ignored by stage searches)
    #[arg(long, value_parser = parse_positive)]
    snr: Option<f64>,

    /// RNG seed for randomized runs, logged in CSV headers (default 42)
    #[arg(long)]
    seed: Option<u64>,

    /// Output path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format (default: pretty-table for compute, csv otherwise)
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,

    /// Throughput-penalty constant set (default derivation)
    #[arg(long, value_parser = parse_constants)]
    constants: Option<ConstantVariant>,

    /// Relaying scheme (default qmf)
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<RelayScheme>,

    /// Flat key=value file mirroring these flags; flags win
    #[arg(long)]
    config: Option<PathBuf>,

    /// Grid override LO:HI:POINTS for the swept axis
    #[arg(long, value_parser = parse_range)]
    range: Option<RangeSpec>,
}

#[derive(Parser, Debug)]
#[command(
    name = "ratekit",
    version,
    about = "Sum rates of cooperative and multihop schemes in dense wireless grid networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate schemes at one operating point, one row per (method, n)
    Compute(CommonArgs),
    /// Write the CSV grid behind a named result figure
    Figure {
        /// fig2, fig3, fig5, fig7, fig8, fig9 or fig10
        #[arg(value_parser = figures::parse_figure_id)]
        id: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sweep one axis while holding the rest of the configuration fixed
    Sweep {
        #[arg(value_enum)]
        axis: sweep::Axis,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a named verification suite; exits 1 on any check failure
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Io(io::Error),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

/// RATEKIT_THREADS bounds the rayon pool; unset keeps the rayon default.
fn init_threads() -> Result<(), ConfigError> {
    let Ok(raw) = std::env::var("RATEKIT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .map_err(|_| ConfigError(format!("RATEKIT_THREADS='{raw}' is not a thread count")))?;
    if threads == 0 {
        return Err(ConfigError("RATEKIT_THREADS must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| ConfigError(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Compute(common) => {
            let cfg = resolve(&common)?;
            Ok(compute::run_compute(&cfg)?)
        }
        Command::Figure { id, common } => {
            let cfg = resolve(&common)?;
            figures::run_figure(&id, &cfg)
        }
        Command::Sweep { axis, common } => {
            let cfg = resolve(&common)?;
            sweep::run_sweep(axis, &cfg)
        }
        Command::Verify { suite, common } => {
            let cfg = resolve(&common)?;
            verify::run_verify(suite, &cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(CliError::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

//! `gpress`: pressure intervals, structural checks and transfer-matrix
//! oracles for nearest-neighbour interactions on Z².

mod commands;
mod output;
mod select;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "gpress", version, about = "Interval bounds on the pressure of Z^2 nearest-neighbour interactions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Limit on exponential state counts (canopy ensembles, row states).
    #[arg(long, global = true, env = "GPRESS_BUDGET")]
    pub budget: Option<u64>,

    /// Write the document here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Single-site fillability and safe-symbol certification.
    Check {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Pressure interval from a periodic point at canopy radius n.
    Pressure {
        #[command(flatten)]
        model: ModelArgs,
        /// Periodic point: zeros, parity, diag3 or file:PATH.
        #[arg(long, default_value = "zeros")]
        nu: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
    },
    /// Transfer-matrix reference values.
    Oracle {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = OracleMode::Strip)]
        mode: OracleMode,
        /// Largest strip width or box side.
        #[arg(long, alias = "size", value_parser = clap::value_parser!(u32).range(1..))]
        width: u32,
    },
    /// CSV table of pressure intervals over a range of radii.
    Study {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "zeros")]
        nu: String,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        n_min: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n_max: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    Strip,
    Box,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// hardsquare, checkerboard, ising, fullshift or file:PATH.
    #[arg(long)]
    pub model: String,
    /// Hard-square activity.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Number of checkerboard colours.
    #[arg(short = 'k')]
    pub k: Option<usize>,
    /// Ising inverse temperature.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Full-shift alphabet size.
    #[arg(short = 'q')]
    pub q: Option<usize>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(gpress::Error),
}

impl From<gpress::Error> for CliError {
    fn from(e: gpress::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_budget() => 4,
            CliError::Core(e) if e.is_hypothesis_failure() => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.workers {
        Some(0) => Err(CliError::Usage("--workers must be at least 1".into())),
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(|| commands::run(&cli)),
            Err(e) => Err(CliError::Usage(format!("cannot start {w} workers: {e}"))),
        },
        None => commands::run(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

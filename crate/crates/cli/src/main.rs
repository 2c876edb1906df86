//! Command-line front end: simulation, equilibria, delay stability and
//! bifurcation scans of the delayed three-population model.

mod commands;
mod config;
mod format;

use std::fmt;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "sitdde", version, about, allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the delayed system from a constant history and print t,w,g,s.
    Simulate(SimulateArgs),
    /// Report the trivial, boundary and positive equilibria.
    Equilibria(ModelArgs),
    /// Delay-dependent stability of every positive equilibrium.
    Stability(StabilityArgs),
    /// Sample the long-term attractor over a parameter range.
    Scan(ScanArgs),
}

/// Model parameters and output options shared by every subcommand.
#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub xi1: Option<f64>,
    #[arg(long)]
    pub xi2: Option<f64>,
    #[arg(long)]
    pub xi3: Option<f64>,
    /// Delay.
    #[arg(long)]
    pub tau: Option<f64>,
    /// `key = value` file supplying any flag; flags take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// csv or tsv.
    #[arg(long)]
    pub format: Option<String>,
    /// Significant digits of printed numbers.
    #[arg(long)]
    pub precision: Option<usize>,
}

#[derive(Debug, Args)]
pub struct HistoryArgs {
    /// Constant history of w on [-tau, 0].
    #[arg(long)]
    pub w0: Option<f64>,
    #[arg(long)]
    pub g0: Option<f64>,
    #[arg(long)]
    pub s0: Option<f64>,
    /// Integration step; aligned so that tau is a whole number of steps.
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub history: HistoryArgs,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Print every n-th mesh point; the final point is always printed.
    #[arg(long)]
    pub stride: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Highest branch index j of the critical delays.
    #[arg(long)]
    pub j_max: Option<usize>,
    /// Also report the spectrum of the boundary equilibrium.
    #[arg(long)]
    pub boundary: bool,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub history: HistoryArgs,
    /// Parameter to vary: a, b, c, r, xi1, xi2, xi3 or tau.
    #[arg(long)]
    pub vary: Option<String>,
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub n_points: Option<usize>,
    /// Time discarded before sampling.
    #[arg(long)]
    pub transient: Option<f64>,
    /// Length of the sampling window.
    #[arg(long)]
    pub sample_time: Option<f64>,
    /// w, g or s.
    #[arg(long)]
    pub observable: Option<String>,
    /// extrema or strobe.
    #[arg(long)]
    pub sampler: Option<String>,
    #[arg(long)]
    pub strobe_period: Option<f64>,
    /// Per-point classification file; defaults next to --out, else stderr.
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(sitdde_core::Error),
    NoPositiveEquilibrium,
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use sitdde_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                E::InvalidParameter { .. }
                | E::InvalidInput(_)
                | E::InvalidConfig(_)
                | E::InvalidStep { .. } => 2,
                E::BlowUp { .. } => 3,
                E::DegenerateParameters(_) | E::ComplexBranch { .. } => 4,
                _ => 1,
            },
            CliError::NoPositiveEquilibrium => 5,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::NoPositiveEquilibrium => {
                f.write_str("no positive equilibrium exists for these parameters")
            }
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<sitdde_core::Error> for CliError {
    fn from(e: sitdde_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

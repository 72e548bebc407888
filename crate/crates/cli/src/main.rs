//! `grushin`: evaluations, geodesic data, distortion coefficients and MCP
//! reports for the α-Grushin plane.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error, 3 cut-locus or
//! geometry error.

mod commands;
mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grushin::mcp::Family;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] grushin::Error),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(grushin::Error::CutLocus(_) | grushin::Error::NoConvergence { .. }) => 3,
            CliError::Core(_) | CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Exponent α ≥ 1 of the Grushin plane.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Seed of the Monte-Carlo oracle.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrigFn {
    Sin,
    Cos,
    Pi,
    #[value(name = "F")]
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Oracle {
    Fd,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Panel {
    /// Fan from the singular point `(0, 0)`.
    #[value(alias = "singular")]
    Left,
    /// Fan from the Riemannian point `(1, 0)`.
    #[value(alias = "riemannian")]
    Right,
}

#[derive(Debug, Parser)]
#[command(name = "grushin", version, about = "Geodesics, cut loci and distortion of the alpha-Grushin plane")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate sin_α, cos_α, π_α or the incomplete integral F.
    Trig {
        #[command(flatten)]
        common: Common,
        #[arg(long = "fn", value_enum)]
        func: TrigFn,
        /// A value or a range `a..b`; repeatable.
        #[arg(long = "x", allow_hyphen_values = true)]
        x: Vec<String>,
        /// Intervals per range.
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// Sample a geodesic, or a fan of unit-speed geodesics, on `[0, tmax]`.
    #[command(group = clap::ArgGroup::new("initial").required(true).args(["cov", "fan"]))]
    Geodesic {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse::pair, allow_hyphen_values = true)]
        q0: (f64, f64),
        /// Initial covector `u,v`.
        #[arg(long, value_parser = parse::pair, allow_hyphen_values = true)]
        cov: Option<(f64, f64)>,
        /// Number of geodesics of the fan.
        #[arg(long)]
        fan: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        tmax: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Initial covector of the minimizing geodesic from q0 to q1.
    Connect {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse::pair, allow_hyphen_values = true)]
        q0: (f64, f64),
        #[arg(long, value_parser = parse::pair, allow_hyphen_values = true)]
        q1: (f64, f64),
    },
    /// Distortion coefficients β_t(q0, q1).
    Beta {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse::pair, allow_hyphen_values = true)]
        q0: (f64, f64),
        #[arg(long, value_parser = parse::pair, allow_hyphen_values = true)]
        q1: (f64, f64),
        /// A value or a range `a..b`; repeatable.
        #[arg(long = "t", default_value = "0..1")]
        t: Vec<String>,
        /// Intervals per range.
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, value_enum)]
        oracle: Option<Oracle>,
        /// Ball radius of the Monte-Carlo oracle.
        #[arg(long, default_value_t = 0.01)]
        radius: f64,
        /// Sample count of the Monte-Carlo oracle.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Step of the finite-difference oracle.
        #[arg(long, default_value_t = 1e-4)]
        fd_step: f64,
    },
    /// Critical dimension and a sweep of β_t ≥ t^N over a family.
    Mcp {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "horizontal", value_parser = |s: &str| s.parse::<Family>().map_err(|e| e.to_string()))]
        family: Family,
        /// Exponent of the bound; defaults to the critical dimension.
        #[arg(long = "N")]
        n: Option<f64>,
        /// Override the number of grid nodes per parameter.
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Geodesic fans of either panel of the illustration, each up to its cut time.
    Figure {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "left")]
        panel: Panel,
        #[arg(long, default_value_t = 16)]
        count: usize,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! `fsparse` command-line harness.
//!
//! Exit status: 0 on success, 1 on numerical or runtime failure, 2 on usage
//! or input-format errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};

pub mod commands;
pub mod error;
pub mod keyvalue;
pub mod manifest;
pub mod output;

pub use error::{CliError, CliResult};
pub use output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "fsparse",
    version,
    about = "Lattice counts, saddle points and sparse Fourier selection"
)]
pub struct Cli {
    /// Base seed for randomized subcommands (overrides a config-file seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output format for reports printed on stdout.
    #[arg(long, global = true, value_enum, default_value = "plain")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact lattice point counts N1, N2 and N = N1 - N2 in a d*-ball.
    Count(CountArgs),
    /// Saddle point z_gamma of log h(z) - gamma log z.
    Saddle(SaddleArgs),
    /// Table of (gamma, z_gamma, l_gamma(z_gamma)) on a gamma grid.
    Curve(CurveArgs),
    /// Regime constants and sample-size flags as JSON.
    Regime(RegimeArgs),
    /// Threshold selection of relevant coordinates from a CSV sample.
    Select(SelectArgs),
    /// Monte Carlo recovery error over a grid of sample sizes.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("radius").required(true).args(["gamma", "radius_sq"])))]
pub struct CountArgs {
    /// Number of lattice dimensions d*.
    #[arg(long)]
    pub dstar: usize,
    /// Radius parameter: counts points with |k|^2 <= floor(gamma * d*).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Integer squared radius.
    #[arg(long = "radius-sq")]
    pub radius_sq: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SaddleArgs {
    #[arg(long)]
    pub gamma: f64,
    /// Root tolerance on |phi(y) - gamma|.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long = "gamma-min")]
    pub gamma_min: f64,
    #[arg(long = "gamma-max")]
    pub gamma_max: f64,
    /// Number of equally spaced grid points, endpoints included.
    #[arg(long)]
    pub steps: usize,
    /// Output CSV path, `-` for stdout.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RegimeArgs {
    /// `key = value` file with d, d_star, g_min, L, kappa, sigma, L2, L_inf, n, alpha.
    #[arg(long)]
    pub params: PathBuf,
    /// Sample size, overriding the file.
    #[arg(long)]
    pub n: Option<usize>,
    /// Confidence level, overriding the file.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// CSV with header `x1,...,xd,y`; `-` reads stdin.
    #[arg(long)]
    pub data: PathBuf,
    /// `key = value` file with d, d_star, g_min, L, kappa, sigma, L2, L_inf.
    #[arg(long)]
    pub params: PathBuf,
    /// Stop once d* coordinates are selected (checked between levels).
    #[arg(long)]
    pub cap: bool,
    /// Fixed threshold instead of the theorem threshold.
    #[arg(long, conflicts_with = "lambda_scale")]
    pub lambda: Option<f64>,
    /// Constant in front of the threshold shape (theorem value: 4).
    #[arg(long = "lambda-scale")]
    pub lambda_scale: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// `key = value` experiment configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output CSV path, `-` for stdout; a `<out>.manifest.json` sidecar is
    /// written next to a file.
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (program name first) and runs the subcommand, writing
/// reports to `stdout` and diagnostics to `stderr`. Returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                2
            } else {
                let _ = write!(stdout, "{rendered}");
                0
            };
        }
    };
    // reports are buffered so the subcommand can run inside a thread pool
    let mut buffer = Vec::new();
    let result = match cli.threads {
        Some(0) => Err(error::usage("--threads must be at least 1")),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| commands::dispatch(&cli, &mut buffer)),
            Err(e) => Err(CliError::Runtime(format!("thread pool: {e}"))),
        },
        None => commands::dispatch(&cli, &mut buffer),
    };
    let result = result.and_then(|()| stdout.write_all(&buffer).map_err(CliError::from));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

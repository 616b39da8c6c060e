//! Command-line front end: argument parsing, config resolution and reports.

pub mod commands;
pub mod config;
pub mod exit;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{run_qfi, run_scan_command, run_verify, Streams, DEFAULT_GRID_STEPS};
use crate::config::{Overrides, RunConfig};
use crate::exit::CliError;

#[derive(Debug, Parser)]
#[command(name = "mzi-qfi", version, about = "Quantum Fisher information of a two-mode Mach-Zehnder interferometer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// QFI matrix, model QFIs and Cramer-Rao bounds at one input.
    Qfi(CommonArgs),
    /// Cross-check the closed form against a truncated Fock simulation.
    Verify(CommonArgs),
    /// Scan the amplitude phases at fixed photon numbers.
    Scan {
        #[command(flatten)]
        common: CommonArgs,
        /// Grid points per phase axis.
        #[arg(long, default_value_t = DEFAULT_GRID_STEPS)]
        grid_steps: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha1_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha1_im: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha2_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha2_im: Option<f64>,
    /// Squeeze parameter of mode 1.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// Parametrization model: a, b, c or d.
    #[arg(long)]
    pub model: Option<String>,
    /// Fock levels per mode; omitted means closed form (qfi) or auto-sizing (verify).
    #[arg(long)]
    pub trunc: Option<usize>,
    /// Number of repetitions for the Cramer-Rao bound.
    #[arg(long)]
    pub nu: Option<u64>,
    /// Output format: csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Write data here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            alpha1_re: self.alpha1_re,
            alpha1_im: self.alpha1_im,
            alpha2_re: self.alpha2_re,
            alpha2_im: self.alpha2_im,
            r: self.r,
            model: self.model.clone(),
            trunc: self.trunc,
            nu: self.nu,
            format: self.format.clone(),
            config: self.config.clone(),
        }
    }
}

fn dispatch(cli: &Cli, streams: &mut Streams<'_>) -> Result<(), CliError> {
    match &cli.command {
        Command::Qfi(args) => run_qfi(&RunConfig::resolve(&args.overrides())?, args.out.as_deref(), streams),
        Command::Verify(args) => run_verify(&RunConfig::resolve(&args.overrides())?, args.out.as_deref(), streams),
        Command::Scan { common, grid_steps } => run_scan_command(
            &RunConfig::resolve(&common.overrides())?,
            *grid_steps,
            common.out.as_deref(),
            streams,
        ),
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let mut streams = Streams { stdout, stderr };
    match dispatch(cli, &mut streams) {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(streams.stderr, "error: {e}");
            e.code
        }
    }
}

//! `spindyn`: integrate two-spinor particle dynamics from JSON scenarios.

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spindyn::cli;
use spindyn::verify::tolerance_from_env;

/// Natural units (c = 1). Charge and mass are in any consistent units;
/// the coupling K = q/m is formed internally.
///
/// Exit codes: 0 success, 1 verification failure, 2 config error,
/// 3 runtime or physics error. SPINDYN_TOL overrides the residual
/// tolerance used by `verify` (default 1e-9).
#[derive(Parser)]
#[command(name = "spindyn", version, about = "Two-spinor charged-particle and spin-tetrad integrator")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write the trajectory as CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated charges; each run writes <stem>_q<charge>.<ext>.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        sweep: Option<Vec<f64>>,
    },
    /// Run the invariant suite against a scenario.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        /// Add this amount to pi^0 halfway through the run.
        #[arg(long, allow_hyphen_values = true)]
        perturb: Option<f64>,
    },
    /// Boost the initial state to rest and print its spin structure.
    RestFrame {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fit transverse precession frequencies in a constant B along z.
    Precession {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { cli::EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let mut out = io::stdout().lock();
    let mut err = io::stderr().lock();
    let code = match args.command {
        Command::Simulate { config, out: path, sweep } => {
            cli::cmd_simulate(&config, &path, sweep.as_deref(), &mut out, &mut err)
        }
        Command::Verify { config, json, perturb } => match tolerance_from_env() {
            Ok(tol) => cli::cmd_verify(&config, json, perturb, tol, &mut out, &mut err),
            Err(msg) => {
                eprintln!("config error: {msg}");
                cli::EXIT_CONFIG
            }
        },
        Command::RestFrame { config } => cli::cmd_rest_frame(&config, &mut out, &mut err),
        Command::Precession { config } => cli::cmd_precession(&config, &mut out, &mut err),
    };
    ExitCode::from(code as u8)
}

//! Command line front end for the exact spectral calculus engine.
//!
//! One job per invocation; outputs are deterministic given the same
//! inputs and seed. Exit codes: 0 success, 1 verification failures
//! (verify), 2 malformed input, 3 precondition violation, 4 internal
//! verification failure.

mod commands;
mod schema;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "symfold")]
#[command(about = "Exact spectral calculus: symmetric decompositions, foldings and moment tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a trace-zero step element into three commuting
    /// spectrally symmetric summands
    Decompose {
        /// input JSON: {"atoms":[{"value":"p/q","mass":"p/q"},...],"stabilize":bool}
        #[arg(short, long)]
        input: PathBuf,
        /// output JSON report
        #[arg(short, long)]
        output: PathBuf,
        /// odd-moment table order K
        #[arg(short = 'k', long, default_value_t = 9)]
        moments: u32,
    },
    /// Re-verify a previously emitted decomposition report from its
    /// serialized data alone
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        /// optional JSON report of the verification outcome
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit a CSV table of exact moments against quantile moments, plus
    /// quantile breakpoints for plotting
    Moments {
        #[arg(short, long)]
        input: Option<PathBuf>,
        /// highest moment order K
        #[arg(short = 'k', long, default_value_t = 12)]
        order: u32,
        #[arg(short, long)]
        output: PathBuf,
        /// CSV of (t, omega(t)) breakpoints
        #[arg(long)]
        quantile_output: Option<PathBuf>,
        /// run on the built-in uniform-spectrum element instead of a file
        #[arg(long)]
        demo_mediator: bool,
    },
    /// Fold a positive step element as a multiple of a fresh projection
    FoldLocal {
        /// input JSON: {"atoms":[...],"q_dim":"p/q","beta":"p/q"?}
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Generate a random mediator 2-folding, verify its moment closed
    /// forms, and emit the members
    DemoGamma {
        /// seed for the instance generator
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Decompose { input, output, moments } => {
            commands::run_decompose(&input, &output, moments)
        }
        Command::Verify { input, output } => commands::run_verify(&input, output.as_deref()),
        Command::Moments { input, order, output, quantile_output, demo_mediator } => {
            commands::run_moments(
                input.as_deref(),
                order,
                &output,
                quantile_output.as_deref(),
                demo_mediator,
            )
        }
        Command::FoldLocal { input, output } => commands::run_fold_local(&input, &output),
        Command::DemoGamma { seed, output } => commands::run_demo_gamma(seed, &output),
    };
    ExitCode::from(code)
}

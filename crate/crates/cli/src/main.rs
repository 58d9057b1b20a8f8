//! Batch command-line surface for the linear timecode toolkit.
//!
//! Exit codes are a stable contract: 0 success, 1 I/O failure, 2 usage
//! error, 3 signal/decoding failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Config;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Usage(String),
    Signal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Signal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Usage(m) | CliError::Signal(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "ltcforge",
    version,
    about = "Generate, decode, simulate, and analyze GNSS-disciplined linear timecode"
)]
struct Cli {
    /// Seed for operations involving randomness (fallback: $LTCFORGE_SEED, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// JSON file providing defaults for any flag, keyed by flag name.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Modulate a run of consecutive timecodes into a WAV file.
    Encode(commands::EncodeArgs),
    /// Demodulate a WAV file and assign timecodes to video frame times.
    Decode(commands::DecodeArgs),
    /// Run the timer-hierarchy simulation and export the edge trace.
    Simulate(commands::SimulateArgs),
    /// Print the upper bound on uninterrupted synchronization time.
    Budget(commands::BudgetArgs),
    /// Compute alignment metrics over (ltc_time, reference_time) pairs.
    Evaluate(commands::EvaluateArgs),
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("LTCFORGE_SEED")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match Config::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return ExitCode::from(e.exit_code());
        }
    };
    let seed = resolve_seed(cli.seed);

    let result = match cli.command {
        Command::Encode(args) => commands::run_encode(args, &config),
        Command::Decode(args) => commands::run_decode(args, &config),
        Command::Simulate(args) => commands::run_simulate(args, &config, seed),
        Command::Budget(args) => commands::run_budget(args, &config),
        Command::Evaluate(args) => commands::run_evaluate(args, &config),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

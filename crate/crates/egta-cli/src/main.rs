//! Experiment runner: generate games, run PSRO batches, compute MRCP, emit
//! evaluation reports, and reproduce the canned desk-scale experiments.

mod commands;
mod config;
mod errors;
mod io;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "egta", version, about = "EGTA strategy-exploration toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a game file from a named spec.
    Generate(commands::generate::Args),
    /// Run a PSRO experiment batch from a config file.
    Psro(commands::psro::Args),
    /// Compute MRCP for an empirical game of a stored game.
    Mrcp(commands::mrcp::Args),
    /// Evaluate stored traces.
    #[command(subcommand)]
    Eval(commands::eval::Args),
    /// Re-run a canned experiment recipe at desk scale.
    Reproduce(commands::reproduce::Args),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{err}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Generate(args) => commands::generate::run(args),
        Command::Psro(args) => commands::psro::run(args),
        Command::Mrcp(args) => commands::mrcp::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::Reproduce(args) => commands::reproduce::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

//! `qcsample`: plan design, interval estimates, curve export, simulation
//! and the session service from the command line.
//!
//! Exit status is 0 on success, 2 for invalid input or an infeasible
//! request, and 1 for any other failure.

mod args;
mod commands;
mod error;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tracing_subscriber::EnvFilter;

use commands::curve::CurveCmd;
use commands::interval::{CiCmd, SampleSizeCmd};
use commands::plan::PlanCmd;
use commands::serve::ServeCmd;
use commands::simulate::SimulateCmd;

#[derive(Debug, Parser)]
#[command(name = "qcsample", version, about = "Acceptance sampling for annotated datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    Plan(PlanCmd),
    Ci(CiCmd),
    #[command(name = "samplesize")]
    SampleSize(SampleSizeCmd),
    Curve(CurveCmd),
    Simulate(SimulateCmd),
    Serve(ServeCmd),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();
    let result = match &cli.command {
        Command::Plan(c) => commands::plan::run(c),
        Command::Ci(c) => commands::interval::run_ci(c),
        Command::SampleSize(c) => commands::interval::run_sample_size(c),
        Command::Curve(c) => commands::curve::run(c),
        Command::Simulate(c) => commands::simulate::run(c),
        Command::Serve(c) => commands::serve::run(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}

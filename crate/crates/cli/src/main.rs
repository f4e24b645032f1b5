//! `qprep`: synthesize, simulate and verify upsampling state-preparation
//! circuits.
//!
//! Exit codes: 0 success, 1 other failure (I/O, numerics), 2 invalid input,
//! 3 qubit budget exceeded, 4 verification tolerance not met.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Plan, RunArgs, ValidationError};

#[derive(Parser)]
#[command(
    name = "qprep",
    version,
    about = "Upsampling state preparation for probability distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the circuit and write it as JSON and/or QASM.
    Synth(RunArgs),
    /// Simulate the circuit and report the register's probabilities.
    Simulate(RunArgs),
    /// Simulate and compare against the amplitude oracles.
    Verify(RunArgs),
    /// Build the binary-tree form and report its depth and swap count.
    Fork(RunArgs),
    /// Verify a range of register sizes at fixed window and write CSV rows.
    Sweep(RunArgs),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<commands::ToleranceFailure>().is_some() {
        return 4;
    }
    if err.downcast_ref::<ValidationError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<qprep_core::Error>() {
        Some(qprep_core::Error::QubitBudget { .. }) => 3,
        Some(
            qprep_core::Error::InvalidParameter(_)
            | qprep_core::Error::Mismatch(_)
            | qprep_core::Error::IndexOutOfRange { .. }
            | qprep_core::Error::MalformedGate(_)
            | qprep_core::Error::Json(_),
        ) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (args, action): (&RunArgs, fn(&Plan) -> anyhow::Result<()>) = match &cli.command {
        Command::Synth(a) => (a, commands::synth),
        Command::Simulate(a) => (a, commands::simulate_cmd),
        Command::Verify(a) => (a, commands::verify_cmd),
        Command::Fork(a) => (a, commands::fork),
        Command::Sweep(a) => (a, commands::sweep),
    };
    action(&Plan::from_args(args)?)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

//! Command-line front end. Exit codes: 0 when every executed check passes,
//! 1 when a check fails, 2 for usage errors, 3 for computation, parse or I/O
//! errors.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use commands::Failure;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

//! Command-line front end: argument parsing, input files, commands and
//! report emission.

pub mod args;
pub mod commands;
pub mod error;
pub mod inputs;

use std::io::Write;

use args::{Cli, Command};
use commands::Output;
use error::CliError;

pub fn dispatch(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Run(a) => commands::run(a),
        Command::Verify(a) => commands::verify(a),
        Command::Montecarlo(a) => commands::montecarlo(a),
        Command::Gen(a) => commands::gen(a),
        Command::Oracle(a) => commands::oracle(a),
    }
}

/// Writes the report to its destination; returns the exit status.
pub fn emit(output: Output) -> Result<u8, CliError> {
    match &output.out {
        Some(path) => inputs::write_file(path, &output.report)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.report.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e))?;
        }
    }
    Ok(output.status)
}

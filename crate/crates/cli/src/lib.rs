//! Command-line front end: evaluate the operators, run the verification
//! suites, sweep degrees and write CSV/JSON reports.
//!
//! Exit codes: 0 when every check passes or is inconclusive, 1 on a hard
//! failure, 2 on a configuration error.

mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;

use clap::Parser;

pub use commands::{execute, Outcome};
pub use config::{Cli, Command, Format, Options, RunConfig};
pub use error::{CliError, Result};

/// Runs a parsed invocation and returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    match RunConfig::from_cli(cli).and_then(|config| execute(&config)) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Parses `args` (program name first) and runs.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    }
}

//! Command-line front end for the `repseq` root finder.
//!
//! Commands return an [`Outcome`] instead of printing, so the binary stays a
//! thin wrapper and tests can inspect output and exit codes directly.

pub mod args;
pub mod commands;
pub mod render;

use std::ffi::OsString;

use clap::Parser;

pub use args::{Cli, Command, Format, RunConfig};
pub use commands::{cmd_run, cmd_trace, cmd_verify, cmd_verify_with, Outcome};

pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const NOT_CONVERGED: i32 = 2;
    pub const INPUT_ERROR: i32 = 3;
    pub const ORACLE_DISAGREES: i32 = 4;
    pub const ENGINE_OVERFLOW: i32 = 5;
}

pub fn execute(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Run(cfg) => cmd_run(cfg),
        Command::Trace(cfg) => cmd_trace(cfg),
        Command::Verify(cfg) => cmd_verify(cfg),
    }
}

/// Parses `args` (including the program name) and runs the selected command.
pub fn run_from_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { exit::INPUT_ERROR } else { exit::OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome::new(code, String::new(), text)
            } else {
                Outcome::new(code, text, String::new())
            }
        }
    }
}

//! Command-line front end for `alphamap-core`.
//!
//! Exit codes: 0 success, 1 failed certification or battery (output files
//! are still written), 2 usage error.

pub mod args;
pub mod commands;

use std::ffi::OsString;

use clap::Parser;
use thiserror::Error;

use args::{Cli, Command};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] alphamap_core::Error),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use alphamap_core::Error as E;
        match self {
            Self::Usage(_) => 2,
            Self::Core(E::Parameter(_) | E::Boundary(_) | E::InvalidGrid(_) | E::TooCoarse { .. }) => 2,
            Self::Core(_) | Self::Write { .. } => 1,
        }
    }
}

/// Parse `argv`, run the command and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = match cli.command {
        Command::Minimize(a) => a.resolve().and_then(commands::minimize).map(|r| r.exit_code),
        Command::Sweep(a) => a.resolve().and_then(commands::sweep).map(|r| r.exit_code),
        Command::Verify(a) => a.resolve().and_then(commands::verify).map(|r| r.exit_code),
        Command::Family(a) => a.resolve().and_then(commands::family).map(|r| r.exit_code),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

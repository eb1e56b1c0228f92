//! `uqm`: seeded simulations of universal quantum measurements with JSON reports.
//!
//! Exit codes: 0 success, 1 a check exceeded its tolerance, 2 bad input data,
//! 3 bad configuration.

mod args;
mod commands;
mod io;
mod report;

use std::ffi::OsString;

use clap::Parser;

pub use args::{Cli, Command};
pub use report::{Check, Report, ResolvedConfig, ToolInfo};

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("invalid input: {0}")]
    BadData(String),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::CheckFailed(_) => 1,
            Failure::BadData(_) => 2,
            Failure::BadConfig(_) => 3,
        }
    }
}

impl From<uqm_core::Error> for Failure {
    fn from(e: uqm_core::Error) -> Self {
        Failure::BadData(e.to_string())
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("uqm: {f}");
            f.exit_code()
        }
    }
}

/// Runs a parsed command, writing its report; `Err` carries the exit status.
pub fn execute(cli: &Cli) -> Result<(), Failure> {
    let config = ResolvedConfig::resolve(cli)?;
    match config.threads {
        Some(0) => Err(Failure::BadConfig("--threads must be at least 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Failure::BadConfig(format!("cannot build thread pool: {e}")))?
            .install(|| commands::dispatch(cli, &config)),
        None => commands::dispatch(cli, &config),
    }
}

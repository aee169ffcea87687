//! `fraclap`: command-line front end for the radial profile solvers.
//!
//! Exit status: 0 on success, 1 when `selftest` has failing checks, 2 when a
//! solver fails (the message names the method and radius), 64 for invalid
//! flags or parameter values, 74 when the output cannot be written.

mod cli;
mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use cli::{Cli, Command};

const EXIT_SELFTEST: u8 = 1;
const EXIT_EVAL: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 74;

/// Thread cap for the grid fan-out; 0 or unset means one per core.
const THREADS_ENV: &str = "FRACLAP_THREADS";

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Eval(fraclap::Error),
    Io(std::io::Error),
}

fn thread_count() -> Result<usize, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::Usage(format!(
                "{THREADS_ENV} must be a nonnegative integer, got '{v}'"
            ))
        }),
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| Failure::Usage(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Profile(a) => commands::cmd_profile(a).map(|_| true),
        Command::Compare(a) => commands::cmd_compare(a).map(|_| true),
        Command::Asymptote(a) => commands::cmd_asymptote(a).map(|_| true),
        Command::Selftest(a) => commands::cmd_selftest(a.tol),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_SELFTEST),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Eval(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_EVAL)
        }
        Err(Failure::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: cannot write output: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}

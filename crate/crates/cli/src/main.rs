//! `bargainlab`: learning dynamics and equilibrium experiments for
//! alternating-offer bargaining.

mod args;
mod config;
mod output;
mod region;
mod regret;
mod run;
mod svg;
mod sweep;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};

/// Exit statuses.
pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_INCOMPLETE: u8 = 3;

/// An error carrying the exit status to report.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

pub type Outcome = std::result::Result<u8, Failure>;

pub trait Invalid<T> {
    /// Marks an error as invalid input (exit status 2).
    fn invalid(self) -> std::result::Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Invalid<T> for std::result::Result<T, E> {
    fn invalid(self) -> std::result::Result<T, Failure> {
        self.map_err(|e| Failure {
            code: EXIT_INVALID,
            error: e.into(),
        })
    }
}

pub trait Internal<T> {
    /// Marks an error as an internal failure (exit status 1).
    fn internal(self) -> std::result::Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Internal<T> for std::result::Result<T, E> {
    fn internal(self) -> std::result::Result<T, Failure> {
        self.map_err(|e| Failure {
            code: 1,
            error: e.into(),
        })
    }
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let args = match config::expand_config_args(raw) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let cli = Cli::parse_from(args);
    if let Some(jobs) = cli.jobs.filter(|&j| j > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("warning: {e}");
        }
    }
    let result = match &cli.command {
        Command::Run(a) => run::run(a),
        Command::Sweep(a) => sweep::sweep(a),
        Command::SpeRegion(a) => region::spe_region(a),
        Command::Regret(a) => regret::regret(a),
        Command::VerifySpe(a) => verify::verify_spe(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

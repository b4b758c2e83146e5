//! `sir-gauge` command-line frontend.
//!
//! Exit status: 0 on success, 1 for invalid input or usage, 2 when a
//! numerical procedure fails on valid input.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::Inputs;

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numerical(String),
}

impl Failure {
    fn io(e: impl std::fmt::Display) -> Self {
        Failure::Validation(format!("i/o error: {e}"))
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Validation(m) | Failure::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<sir_gauge::Error> for Failure {
    fn from(e: sir_gauge::Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.global;
    let inputs = Inputs::new(g)?;
    let out = g.out.as_deref();
    let output = match &cli.command {
        Command::Solve(a) => commands::solve(&inputs, a)?,
        Command::Coeffs(a) => commands::coeffs(&inputs, a)?,
        Command::Radius(a) => commands::radius(&inputs, a)?,
        Command::Survey(a) => commands::survey(a, out)?,
        Command::Singularities(a) => commands::singularities(&inputs, a, g.format)?,
        Command::ErrorScan(a) => commands::error_scan(&inputs, a)?,
        Command::Asymptotics(a) => commands::asymptotics(&inputs, a)?,
        Command::Toy(a) => commands::toy(a)?,
    };
    output::write(out, &output.render(g.format)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

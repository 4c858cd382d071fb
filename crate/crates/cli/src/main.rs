//! `kacmoody`: batch experiments on right-angled Fuchsian Kac-Moody data.
//!
//! Every command prints a JSON report on stdout and, with `--out DIR`,
//! also writes the report and its CSV tables there. The exit status is 0
//! when every audited property holds, 1 when some check fails and 2 on
//! invalid input.

mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use config::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

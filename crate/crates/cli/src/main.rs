// `!(x >= 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};

use crate::args::{Cli, Command};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let matches = Cli::command().get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let (_, sub) = matches.subcommand().expect("subcommand is required");
    let result = match cli.command {
        Command::Sweep(a) => commands::sweep(a, sub),
        Command::CheckInequality(a) => commands::check_inequality(a, sub),
        Command::Mc(a) => commands::mc(a, sub),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("wva: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

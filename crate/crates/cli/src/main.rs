mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::Failure;

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Encrypt(a) => commands::encrypt(a),
        Command::Decrypt(a) => commands::decrypt(a),
        Command::Keystream(a) => commands::keystream(a),
        Command::Rank(a) => commands::rank(a),
        Command::Enttest(a) => commands::enttest(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Catalog => commands::list_catalog(),
    }
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
        Err(f) => {
            eprintln!("lifecrypt: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

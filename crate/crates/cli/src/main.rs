use std::process::ExitCode;

use clap::Parser;

mod config;
mod report;
mod run;

fn main() -> ExitCode {
    let cli = config::Cli::parse();
    match run::run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}

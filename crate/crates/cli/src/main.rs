use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    match readgrade_cli::run(readgrade_cli::Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

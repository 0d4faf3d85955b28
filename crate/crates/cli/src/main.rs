use std::process::ExitCode;

use clap::Parser;
use poncelet_cli::commands::run;
use poncelet_cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("poncelet: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

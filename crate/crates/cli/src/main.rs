use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = qtrap_cli::Cli::parse();
    ExitCode::from(qtrap_cli::run(cli).code())
}

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    cyclosym_cli::run(cyclosym_cli::Cli::parse())
}

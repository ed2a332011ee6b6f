use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = clhui::cli::Cli::parse();
    match clhui::cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = geoslam::app::Cli::parse();
    match geoslam::app::execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = vibronic_cli::Cli::parse();
    match vibronic_cli::run(cli) {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

use std::process::ExitCode;

use clap::Parser;
use trendlab_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("trendlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::process::ExitCode;

use clap::Parser;
use realclock_qm::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("realclock-qm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

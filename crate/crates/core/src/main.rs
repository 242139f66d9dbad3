use std::process::ExitCode;

use aqec_lll::cli::{parse_command, run, EXIT_USAGE};

fn main() -> ExitCode {
    match parse_command(std::env::args_os().skip(1)) {
        Ok(plan) => ExitCode::from(run(&plan)),
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{err}");
                ExitCode::SUCCESS
            } else {
                eprint!("{err}");
                ExitCode::from(EXIT_USAGE)
            }
        }
    }
}

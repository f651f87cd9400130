use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use delta_ineq_cli::{run, CliError};

fn main() -> ExitCode {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    let code = match run(std::env::args_os(), &mut lock) {
        Ok(code) => code,
        Err(CliError::Usage(e)) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            0
        }
        Err(CliError::Usage(e)) => {
            let _ = e.print();
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    };
    let _ = lock.flush();
    ExitCode::from(code as u8)
}

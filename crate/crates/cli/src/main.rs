use std::io;
use std::process::ExitCode;

use clap::Parser;
use kflow_cli::args::Cli;
use kflow_cli::error::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (stdout, stderr) = (io::stdout(), io::stderr());
    match kflow_cli::run(&cli, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // the check table already explains the failure
            if !matches!(e, CliError::CheckFailed(_)) {
                eprintln!("kflow: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

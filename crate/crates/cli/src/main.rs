use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use groupoid_lab_cli::{configure_threads, render, run, Cli, CliError};

fn emit(cli: &Cli, result: Result<groupoid_lab_cli::Report, CliError>) -> Result<(), CliError> {
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            if let Some(r) = e.report() {
                print!("{}", render(cli, r)?);
            }
            return Err(e);
        }
    };
    let out = render(cli, &report)?;
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.as_bytes());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(4) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = configure_threads().and_then(|()| emit(&cli, run(&cli)));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

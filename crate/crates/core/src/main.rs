use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use paircmp::cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rendered) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(rendered.output.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(paircmp::cli::EXIT_INPUT);
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("paircmp: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

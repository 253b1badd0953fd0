mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help and version are not errors
            let code = if e.use_stderr() { commands::EXIT_INPUT } else { commands::EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(commands::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(commands::EXIT_INPUT as u8)
        }
    }
}

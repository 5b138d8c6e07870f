use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use euler_approx_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_path = cli.command.common().out.clone();
    match run(&cli.command) {
        Ok(outcome) => {
            let written = match &out_path {
                Some(path) => std::fs::write(path, &outcome.document).map_err(|e| e.to_string()),
                None => std::io::stdout()
                    .write_all(outcome.document.as_bytes())
                    .map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let err = CliError {
                    code: "IO_ERROR",
                    message: e,
                };
                eprintln!("{}", err.to_json());
                return ExitCode::from(2);
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(2)
        }
    }
}

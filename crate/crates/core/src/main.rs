use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use qkd_dimension::cli::{exit_code, exit_code_for, run, Cli, Output};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(exit_code::USAGE as u8),
            };
        }
    };

    let outcome = run(cli).and_then(|out| match out {
        Output::Report(report) => {
            println!("{}", report.to_json()?);
            Ok(())
        }
        Output::Written(path) => {
            eprintln!("wrote {}", path.display());
            Ok(())
        }
    });

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}

use std::process::ExitCode;

use clap::Parser;
use locc_cli::args::Cli;
use locc_cli::output::{write_output, ExitStatus};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(ExitStatus::Usage.code() as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = locc_cli::run(&cli.command).and_then(|out| {
        write_output(cli.command.common().out.as_deref(), &out.body)?;
        Ok(out)
    });
    match result {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::from(out.status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status().code() as u8)
        }
    }
}

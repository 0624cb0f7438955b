use std::process::ExitCode;

use clap::Parser;

mod cli;
mod commands;

use cli::Cli;
use commands::CliError;

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(err) => {
            let CliError { kind, message } = &err;
            let diag = serde_json::json!({ "error": { "kind": kind, "message": message } });
            eprintln!("{diag}");
            ExitCode::from(1)
        }
    }
}

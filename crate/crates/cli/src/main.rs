//! `sadic`: batch runner for p-adic approximation experiments.

mod config;
mod emit;
mod expr;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use run::Failure;

#[derive(Parser)]
#[command(name = "sadic", about = "Run p-adic approximation experiments from TOML configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment; trailing `key=value` pairs override config entries.
    Run { config: PathBuf, overrides: Vec<String> },
    /// Check a config without running it and print the resolved form.
    Validate { config: PathBuf, overrides: Vec<String> },
    /// Print the version.
    Version,
}

fn fail(f: Failure) -> ExitCode {
    let code = f.exit_code();
    let doc = match &f {
        Failure::Validation(issues) => json!({ "status": "invalid", "errors": issues }),
        Failure::Core(e) => json!({ "status": "error", "errors": [{ "path": "<run>", "message": e.to_string() }] }),
        Failure::Io(e) => json!({ "status": "error", "errors": [{ "path": "<io>", "message": e.to_string() }] }),
    };
    eprintln!("{}", serde_json::to_string_pretty(&doc).unwrap());
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Version => {
            println!("sadic {}", emit::VERSION);
            ExitCode::SUCCESS
        }
        Command::Validate { config, overrides } => {
            let cfg = match config::load(&config, &overrides) {
                Ok(c) => c,
                Err(issues) => return fail(Failure::Validation(issues)),
            };
            let issues = cfg.validate();
            if !issues.is_empty() {
                return fail(Failure::Validation(issues));
            }
            println!("{}", serde_json::to_string_pretty(&json!({ "status": "valid", "config": cfg })).unwrap());
            ExitCode::SUCCESS
        }
        Command::Run { config, overrides } => {
            let cfg = match config::load(&config, &overrides) {
                Ok(c) => c,
                Err(issues) => return fail(Failure::Validation(issues)),
            };
            match run::run(&cfg) {
                Ok(out) => {
                    let status = if out.partial.is_empty() { "ok" } else { "partial" };
                    println!("{}", serde_json::to_string_pretty(&json!({ "status": status, "files": out.files, "partial": out.partial })).unwrap());
                    if out.partial.is_empty() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(3)
                    }
                }
                Err(f) => fail(f),
            }
        }
    }
}

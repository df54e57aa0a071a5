//! `spring` command-line driver.

mod commands;

use std::process::ExitCode;

use clap::Parser;
use spring_partition::ErrorCategory;

use commands::{Cli, ConfigError};

fn category(err: &anyhow::Error) -> ErrorCategory {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<spring_partition::Error>() {
            return e.category();
        }
        if cause.is::<ConfigError>() {
            return ErrorCategory::Config;
        }
        if cause.is::<std::io::Error>() {
            return ErrorCategory::Input;
        }
    }
    ErrorCategory::Internal
}

fn exit_code(c: ErrorCategory) -> u8 {
    match c {
        ErrorCategory::Config => 2,
        ErrorCategory::Input => 3,
        ErrorCategory::Internal => 4,
    }
}

fn one_line(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            // clap's message runs until the blank line before the usage block
            let body = text.split("\n\n").next().unwrap_or("invalid arguments");
            eprintln!("error[config]: {}", one_line(body.trim_start_matches("error: ")));
            return ExitCode::from(2);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let c = category(&err);
            eprintln!("error[{}]: {}", c.as_str(), one_line(&format!("{err:#}")));
            ExitCode::from(exit_code(c))
        }
    }
}

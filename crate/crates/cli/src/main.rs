use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod inputs;
mod output;

use args::{Cli, Command};

/// Exit codes: 0 success, 1 data error, 2 usage error, 3 tolerance failure.
#[derive(Debug)]
pub enum Failure {
    Data(String),
    Tolerance(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Data(_) => 1,
            Failure::Tolerance(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Data(m) | Failure::Tolerance(m) => f.write_str(m),
        }
    }
}

impl From<spixtok_core::Error> for Failure {
    fn from(e: spixtok_core::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

pub type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: could not configure thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Tokenize(a) => commands::tokenize::run(a),
        Command::Features(a) => commands::features::run(a),
        Command::Eval(a) => commands::eval::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}

mod args;
mod commands;
mod config;
mod error;
mod io;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::Globals;
use error::CliError;

fn execute(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?;
    }
    let g = Globals {
        seed: cli.seed,
        out_dir: &cli.out_dir,
    };
    match &cli.command {
        Command::Simulate(a) => commands::simulate(a, &g),
        Command::Decompose(a) => commands::decompose_cmd(a, &g),
        Command::Spectral(a) => commands::spectral(a, &g),
        Command::Scaling(a) => commands::scaling(a, &g),
        Command::Complexity(a) => commands::complexity_cmd(a, &g),
        Command::Intraday(a) => commands::intraday(a, &g),
        Command::Table(a) => commands::table(a, &g),
    }
}

fn run(argv: Vec<OsString>) -> i32 {
    let report = |e: CliError| {
        eprintln!("error: {e}");
        e.exit_code()
    };
    let argv = match config::merge_config(argv) {
        Ok(a) => a,
        Err(e) => return report(e),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os().collect()) as u8)
}

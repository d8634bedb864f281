//! `qiraa` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
//! Standard output carries only results; the resolved configuration and all
//! diagnostics go to standard error.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::DataError;

const USAGE: u8 = 1;
const DATA: u8 = 2;
const INTERNAL: u8 = 3;

/// Bad flag values that clap itself cannot catch.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    use qiraa_core::Error as E;
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return USAGE;
        }
        if cause.is::<DataError>() {
            return DATA;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::InvalidConfig(_) => USAGE,
                E::LengthMismatch(..) => INTERNAL,
                _ => DATA,
            };
        }
        if let Some(e) = cause.downcast_ref::<std::io::Error>() {
            // a closed stdout pipe is not worth a data-error exit
            return if e.kind() == std::io::ErrorKind::BrokenPipe {
                0
            } else {
                DATA
            };
        }
    }
    INTERNAL
}

fn configure_threads() -> Result<(), UsageError> {
    let Ok(raw) = std::env::var("QIRAA_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| UsageError(format!("QIRAA_THREADS must be a non-negative integer, got '{raw}'")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| UsageError(format!("cannot size thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let level = match (cli.quiet, cli.verbose) {
        (true, _) => log::LevelFilter::Error,
        (false, 0) => log::LevelFilter::Warn,
        (false, 1) => log::LevelFilter::Info,
        (false, _) => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .parse_env("QIRAA_LOG")
        .format_timestamp(None)
        .init();

    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(USAGE);
    }

    let result = match cli.command {
        Command::Stats(a) => commands::stats(a),
        Command::Train(a) => commands::train(a),
        Command::Predict(a) => commands::predict(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Grid(a) => commands::grid(a),
        Command::Synth(a) => commands::synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            if code != 0 {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(code)
        }
    }
}

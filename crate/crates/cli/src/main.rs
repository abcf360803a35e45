//! `cfinsler`: reports, identity checks, classification, grid scans and
//! finite-difference checks for complex Finsler metrics in two dimensions.

mod commands;
mod config;
mod text;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Failure};

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("CFINSLER_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::Usage(format!(
            "CFINSLER_THREADS must be a positive integer, got '{v}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    init_threads()?;
    let (out, path) = commands::dispatch(cli.command)?;
    match path {
        Some(p) => {
            fs::write(&p, &out.body).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(out.body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(format!("stdout: {e}")))?;
        }
    }
    Ok(out.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                config::EXIT_PARSE
            } else {
                0
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(config::EXIT_FAILED),
        Err(f) => {
            eprintln!("cfinsler: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

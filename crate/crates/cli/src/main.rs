mod args;
mod config;
mod run;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use shotnoise_core::Error;

/// Single-line diagnostic with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResourceGuard(_) => 3,
            Error::Quadrature { .. } | Error::Divergent(_) => 4,
            _ => 2,
        };
        CliError { code, message: e.to_string() }
    }
}

fn write_to(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::usage(e.to_string()))
        }
    }
}

fn main_inner(cli: Cli) -> Result<u8, CliError> {
    let (cfg, workers, output, table) = match &cli.command {
        Command::Simulate(a) => (config::simulate(a)?, a.workers, a.out.output.clone(), false),
        Command::Moments(a) => (config::moments(a)?, 0, a.out.output.clone(), false),
        Command::Tails(a) => (config::tails(a)?, 0, a.out.output.clone(), false),
        Command::Compare(a) => (config::compare(a)?, a.workers, a.out.output.clone(), false),
        Command::Check(a) => (config::check(a)?, 0, a.output.clone(), a.table),
        Command::Replay(a) => {
            let text = std::fs::read_to_string(&a.file)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", a.file.display())))?;
            let cfg = run::embedded_config(&text)?;
            let out = run::execute(&cfg, a.workers)?;
            write_to(a.output.as_deref(), &out.body)?;
            if let Some(c) = out.console {
                eprint!("{c}");
            }
            return Ok(out.status as u8);
        }
    };
    let out = run::execute(&cfg, workers)?;
    if let Command::Check(_) = cli.command {
        if let Some(p) = &output {
            write_to(Some(p), &out.body)?;
        }
        let mut text = out.console.unwrap_or_default();
        if table {
            if let config::CommandConfig::Check { family, lambda_grid } = &cfg.command {
                text.push_str(&shotnoise_core::limits::check_conditions(family, lambda_grid)?.to_table());
            }
        }
        write_to(None, &text)?;
        return Ok(0);
    }
    write_to(output.as_deref(), &out.body)?;
    if let (Command::Simulate(a), Some(path)) = (&cli.command, &out.path) {
        if let Some(ev) = &a.events {
            let f = std::fs::File::create(ev).map_err(|e| CliError::usage(format!("cannot write {}: {e}", ev.display())))?;
            path.write_events_csv(f)?;
        }
    }
    if let Some(c) = out.console {
        eprint!("{c}");
    }
    Ok(out.status as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("shotnoise: {}", e.message.replace('\n', " "));
            ExitCode::from(e.code)
        }
    }
}

//! Command-line front end for `tkmerge`: `fit`, `monitor`, `simulate`,
//! `bench` and `eval`.

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub mod args;
mod cmd;
pub mod compare;
pub mod config;
pub mod csvio;
pub mod error;
pub mod svg;

use args::{Cli, Command, Opts};
use config::RunConfig;
pub use error::{CliError, Result};

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                4
            } else {
                let _ = write!(stdout, "{e}");
                0
            };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn resolve(name: &str, input: Option<std::path::PathBuf>, opts: &Opts) -> Result<RunConfig> {
    let base = match &opts.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(cmd) = &base.command {
        if cmd != name {
            return Err(CliError::config(format!("configuration is for '{cmd}', not '{name}'")));
        }
    }
    let mut cfg = base.overlay(opts.to_config(input));
    cfg.command = Some(name.to_string());
    if cfg.jobs == Some(0) {
        return Err(CliError::config("--jobs must be at least 1"));
    }
    Ok(cfg)
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<()> {
    let (name, input, opts) = match command {
        Command::Eval { a, b } => return cmd::eval::run(&a, &b, stdout),
        Command::Fit { input, opts } => ("fit", input, opts),
        Command::Monitor { input, opts } => ("monitor", input, opts),
        Command::Simulate { opts } => ("simulate", None, opts),
        Command::Bench { opts } => ("bench", None, opts),
    };
    let cfg = resolve(name, input, &opts)?;
    let report = with_pool(cfg.jobs(), || match name {
        "fit" => cmd::fit::run(&cfg),
        "monitor" => cmd::monitor::run(&cfg),
        "simulate" => cmd::simulate::run(&cfg),
        _ => cmd::bench::run(&cfg),
    })??;
    stdout.write_all(report.as_bytes()).map_err(|source| CliError::Write { path: "<stdout>".into(), source })?;
    Ok(())
}

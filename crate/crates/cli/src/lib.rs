//! CLI front end: argument parsing, config-file merging, thread-pool setup,
//! dispatch, and report emission.
//!
//! Exit codes: 0 when every verdict passed, 1 when any verdict failed or a
//! computation error occurred, 2 for usage errors (unknown flags, malformed
//! configs, missing files).

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use clap::Parser;

pub mod args;
pub mod bodyspec;
mod commands;
pub mod report;

use args::{Cli, Command, CommonArgs};
use report::CommandResult;

/// Environment variable that sets the worker pool size.
pub const THREADS_ENV: &str = "CONVEXSANDWICH_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or malformed inputs → exit 2.
    Usage(String),
    /// Same, but carrying an error chain.
    Usage2(anyhow::Error),
    /// Failure while computing → exit 1.
    Run(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Run(e)
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub json_path: Option<PathBuf>,
    pub csv_path: Option<PathBuf>,
    pub svg_path: Option<PathBuf>,
}

impl RunOutcome {
    fn code(exit_code: i32) -> Self {
        Self {
            exit_code,
            json_path: None,
            csv_path: None,
            svg_path: None,
        }
    }
}

fn load_config_file<T: serde::de::DeserializeOwned>(
    path: &std::path::Path,
) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))
        .map_err(CliError::Usage2)?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing config file {}", path.display()))
        .map_err(CliError::Usage2)
}

fn resolve_threads(common: &CommonArgs) -> usize {
    if let Some(n) = common.threads {
        return n;
    }
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0)
}

fn common_of(cli: &Cli) -> CommonArgs {
    match &cli.command {
        Command::VerifyLemma3(a) => a.common.clone(),
        Command::SectionIdentity(a) => a.common.clone(),
        Command::Eq2Chain(a) => a.common.clone(),
        Command::Mvee(a) => a.common.clone(),
        Command::BallDistance(a) => a.common.clone(),
        Command::MeanNorm(a) => a.common.clone(),
        Command::DvoretzkyScan(a) => a.common.clone(),
        Command::Reduce(a) => a.common.clone(),
        Command::PolarityCheck(a) => a.common.clone(),
    }
}

fn dispatch(cli: &Cli) -> Result<CommandResult, CliError> {
    macro_rules! with_config {
        ($args:expr, $runner:path) => {{
            let a = $args;
            let file = match &a.common.config {
                Some(path) => Some(load_config_file(path)?),
                None => None,
            };
            $runner(a, file.as_ref())
        }};
    }
    match &cli.command {
        Command::VerifyLemma3(a) => with_config!(a, commands::verify_lemma3),
        Command::SectionIdentity(a) => with_config!(a, commands::section_identity),
        Command::Eq2Chain(a) => with_config!(a, commands::eq2_chain),
        Command::Mvee(a) => with_config!(a, commands::mvee),
        Command::BallDistance(a) => with_config!(a, commands::ball_distance),
        Command::MeanNorm(a) => with_config!(a, commands::mean_norm),
        Command::DvoretzkyScan(a) => with_config!(a, commands::dvoretzky_scan),
        Command::Reduce(a) => with_config!(a, commands::reduce),
        Command::PolarityCheck(a) => with_config!(a, commands::polarity_check),
    }
}

/// Parses and runs an invocation; never exits the process.
pub fn run<I, T>(argv: I) -> RunOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.exit_code() == 0 { 0 } else { 2 };
            let _ = e.print();
            return RunOutcome::code(code);
        }
    };
    let common = common_of(&cli);
    let start = Instant::now();
    let outcome = (|| -> Result<RunOutcome, CliError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(resolve_threads(&common))
            .build()
            .context("building worker pool")
            .map_err(CliError::Run)?;
        let result = pool.install(|| dispatch(&cli))?;
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let emitted =
            report::emit(&common.out, &result, wall_ms, common.svg).map_err(CliError::Run)?;
        eprintln!(
            "{}: {} instance(s), {} failure(s) → {}",
            result.command,
            result.rows.len(),
            result.failures,
            emitted.json_path.display()
        );
        Ok(RunOutcome {
            exit_code: i32::from(!emitted.pass),
            json_path: Some(emitted.json_path),
            csv_path: Some(emitted.csv_path),
            svg_path: emitted.svg_path,
        })
    })();
    match outcome {
        Ok(o) => o,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            RunOutcome::code(2)
        }
        Err(CliError::Usage2(e)) => {
            eprintln!("usage error: {e:#}");
            RunOutcome::code(2)
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {e:#}");
            RunOutcome::code(1)
        }
    }
}

//! Driver behind the `mflab` binary. Each subcommand yields one [`Report`];
//! `main` only parses arguments, writes the canonical JSON and picks the
//! exit code.

pub mod args;
pub mod canon;
mod commands;

use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::Parser;
use serde::Serialize;
use serde_json::Value;

pub use args::{Cli, Command};

pub const SCHEMA: &str = "mflab-report/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CERTIFICATE: i32 = 2;

pub const THREADS_ENV: &str = "MF_LAB_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertSummary {
    pub name: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: &'static str,
    pub config: Value,
    pub tolerances: BTreeMap<String, f64>,
    pub payload: Value,
    pub certificates: Vec<CertSummary>,
    /// All certificates passed (vacuously true when there are none).
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

pub(crate) struct Outcome {
    pub payload: Value,
    pub tolerances: BTreeMap<String, f64>,
    pub certificates: Vec<CertSummary>,
}

pub fn run(cli: &Cli) -> anyhow::Result<Report> {
    let start = Instant::now();
    let (config, outcome) = match &cli.command {
        Command::Dilate(a) => (serde_json::to_value(a)?, commands::dilate(a)?),
        Command::Pv(a) => (serde_json::to_value(a)?, commands::pv(a)?),
        Command::Crossed(a) => (serde_json::to_value(a)?, commands::crossed(a)?),
        Command::FiniteCrossed(a) => (serde_json::to_value(a)?, commands::finite_crossed(a)?),
        Command::Freeness(a) => (serde_json::to_value(a)?, commands::freeness(a)?),
        Command::Coset(a) => (serde_json::to_value(a)?, commands::coset(a)?),
        Command::Norm(a) => (serde_json::to_value(a)?, commands::norm(a)?),
        Command::Ball(a) => (serde_json::to_value(a)?, commands::ball(a)?),
        Command::Report(a) => (serde_json::to_value(a)?, commands::report(a)?),
    };
    if let Some((k, v)) = outcome.tolerances.iter().find(|(_, v)| !(**v > 0.0)) {
        bail!("tolerance {k} must be positive, got {v}");
    }
    Ok(Report {
        schema: SCHEMA,
        command: cli.command.name(),
        config,
        tolerances: outcome.tolerances,
        passed: outcome.certificates.iter().all(|c| c.passed),
        certificates: outcome.certificates,
        payload: outcome.payload,
        wall_clock_seconds: cli.timing.then(|| start.elapsed().as_secs_f64()),
    })
}

fn threads_from_env() -> anyhow::Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => {
            let n: usize = s.trim().parse().with_context(|| format!("{THREADS_ENV}={s:?} is not a thread count"))?;
            if n == 0 {
                bail!("{THREADS_ENV} must be at least 1");
            }
            Ok(Some(n))
        }
    }
}

fn emit(text: &str, path: &str) -> anyhow::Result<()> {
    use std::io::Write;
    if path == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())?;
        out.flush()?;
    } else {
        std::fs::write(path, text).with_context(|| format!("writing {path}"))?;
    }
    Ok(())
}

/// Parses `args` (program name first), runs and writes the report.
/// Returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match threads_from_env() {
        Ok(Some(n)) => {
            mflab::par::init_threads(n);
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_USAGE;
        }
    }
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_USAGE;
        }
    };
    let text = match canon::to_canonical(&report) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = emit(&text, &cli.out) {
        eprintln!("error: {e:#}");
        return EXIT_USAGE;
    }
    if report.passed {
        EXIT_OK
    } else {
        EXIT_CERTIFICATE
    }
}

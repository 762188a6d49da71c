//! `jumpexit`: survival, exit-time moments and Monte Carlo cross-checks for
//! finite-range jump processes confined to a domain.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use config::RunConfig;
use output::Output;

#[derive(Parser, Debug)]
#[command(name = "jumpexit", version, about)]
struct Cli {
    /// Run configuration (TOML); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo seed, overriding `mc.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the Monte Carlo and assembly pools.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Survival probability S(t) and absorbed mass F(t).
    Solve,
    /// Mean exit time and the coercivity constant.
    ExitTime,
    /// Exit-time moments up to `solver.k_max`.
    Moments,
    /// Monte Carlo exit-time ensemble and empirical survival.
    Simulate,
    /// Sample paths for plotting.
    Paths,
    /// Discrete identity checks on the assembled operator.
    Verify,
    /// Solver survival against Monte Carlo at the checkpoints.
    Compare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Validation,
    Numerical,
    Verification,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Validation,
            message: message.into(),
        }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Verification,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            ErrorKind::Validation => 2,
            ErrorKind::Numerical => 3,
            ErrorKind::Verification => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<jumpexit_core::Error> for CliError {
    fn from(e: jumpexit_core::Error) -> Self {
        use jumpexit_core::Error as E;
        let kind = if e.is_validation() || matches!(e, E::ZeroRate { .. } | E::Io(_)) {
            ErrorKind::Validation
        } else {
            ErrorKind::Numerical
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    status: &'static str,
    kind: ErrorKind,
    exit_code: u8,
    command: &'a str,
    message: &'a str,
}

fn command_name(c: Command) -> &'static str {
    match c {
        Command::Solve => "solve",
        Command::ExitTime => "exit-time",
        Command::Moments => "moments",
        Command::Simulate => "simulate",
        Command::Paths => "paths",
        Command::Verify => "verify",
        Command::Compare => "compare",
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::validation("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::validation(format!("cannot size thread pool: {e}")))?;
    }
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.mc.seed = seed;
    }
    if let Some(dir) = &cli.out {
        cfg.output.dir = dir.clone();
    }
    let model = cfg.build()?;
    if matches!(cli.command, Command::Simulate | Command::Compare) {
        commands::resolve_t_max(&mut cfg, &model)?;
    }
    let out = Output::create(&cfg.output.dir, cfg.hash())?;
    out.write("config.resolved.toml", &cfg.to_toml())?;
    match cli.command {
        Command::Solve => commands::solve(&cfg, &model, &out),
        Command::ExitTime => commands::exit_time(&cfg, &model, &out),
        Command::Moments => commands::moments(&cfg, &model, &out),
        Command::Simulate => commands::simulate(&cfg, &model, &out),
        Command::Paths => commands::paths(&cfg, &model, &out),
        Command::Verify => commands::verify(&cfg, &model, &out),
        Command::Compare => commands::compare(&cfg, &model, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = ErrorReport {
                status: "error",
                kind: e.kind,
                exit_code: e.exit_code(),
                command: command_name(cli.command),
                message: &e.message,
            };
            eprintln!("{}", serde_json::to_string(&report).expect("report serializes"));
            ExitCode::from(e.exit_code())
        }
    }
}

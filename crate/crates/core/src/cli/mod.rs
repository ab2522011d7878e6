//! Command-line front end: `steady`, `sweep`, `evolve` and `check`.

pub mod check;
pub mod commands;
pub mod config;

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::Error;
use config::{ApproachSelection, RunConfig};

/// Overrides the directory that relative `--out` paths resolve against.
pub const OUT_DIR_ENV: &str = "XXCHAIN_OUT_DIR";

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Run(Error),
    Io(String),
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code_for(e: &Error) -> i32 {
        match e {
            Error::InvalidParams(_) => 1,
            Error::DegenerateSpectrum { .. } => 2,
            _ => 3,
        }
    }

    /// 0 success, 1 config error, 2 degenerate spectrum, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Run(e) => Self::exit_code_for(e),
            CliError::Io(_) | CliError::ChecksFailed(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Run(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
            CliError::ChecksFailed(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

#[derive(Debug, Parser)]
#[command(name = "xxchain", version, about = "Open three-spin XX chain between two thermal baths")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration; every key has a default.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the `approach` key of the config.
    #[arg(long, global = true, value_enum)]
    pub approach: Option<ApproachSelection>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for `sweep`.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Steady state and transport observables, one row per approach.
    Steady,
    /// Steady states over the (T_L, g) grid.
    Sweep,
    /// Spin-current trajectories.
    Evolve,
    /// Invariant suite at the configured parameters.
    Check,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Steady => "steady",
            Command::Sweep => "sweep",
            Command::Evolve => "evolve",
            Command::Check => "check",
        }
    }
}

pub fn load_config(path: Option<&Path>, approach: Option<ApproachSelection>) -> Result<RunConfig, CliError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut cfg = RunConfig::from_toml(&text).map_err(|e| match path {
        Some(p) => CliError::Config(format!("{}: {e}", p.display())),
        None => CliError::Config(e),
    })?;
    if let Some(a) = approach {
        cfg.approach = a;
    }
    Ok(cfg)
}

fn output_path(out: Option<&Path>, command: Command) -> Option<PathBuf> {
    let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    match (out, dir) {
        (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(d)) => Some(d.join(format!("{}.csv", command.name()))),
        (None, None) => None,
    }
}

fn emit(path: Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(&p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = load_config(cli.config.as_deref(), cli.approach)?;
    let path = output_path(cli.out.as_deref(), cli.command);
    let text = match cli.command {
        Command::Steady => commands::cmd_steady(&cfg)?,
        Command::Sweep => {
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(n) = cli.threads {
                pool = pool.num_threads(n);
            }
            let pool = pool.build().map_err(|e| CliError::Config(format!("--threads: {e}")))?;
            pool.install(|| commands::cmd_sweep(&cfg))?
        }
        Command::Evolve => commands::cmd_evolve(&cfg)?,
        Command::Check => {
            let results = check::run_checks(&cfg);
            let failed = results.iter().filter(|r| r.outcome == check::Outcome::Fail).count();
            let report: String = results.iter().map(|r| format!("{r}\n")).collect();
            emit(path, &report)?;
            return if failed == 0 { Ok(()) } else { Err(CliError::ChecksFailed(failed)) };
        }
    };
    emit(path, &text)
}

/// Parses the process arguments, runs, and returns the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("xxchain: {e}");
            e.exit_code()
        }
    }
}

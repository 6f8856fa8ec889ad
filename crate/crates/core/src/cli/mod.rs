//! Batch front end: simulations, convergence sweeps and verification
//! suites driven by a JSON run configuration.
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 for
//! configuration or usage errors, 3 for numerical failures.

mod commands;
mod config;
pub(crate) mod system;

use std::ffi::OsString;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use commands::{
    compare_leok_ohsawa, convergence, loglog_slope, simulate, verify, ConvergenceReport,
    ConvergenceRun, VerifyReport, VerifyTarget, THREADS_ENV,
};
pub use config::{InitialConfig, RunConfig, Tolerances};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "groupoid-int",
    version,
    about = "Variational integrators on Lie groupoids, with discrete Hamilton-Pontryagin verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a discrete trajectory and write it as CSV.
    Simulate(Overrides),
    /// Measure the global error against the continuous solution for a list
    /// of step sizes and fit the order.
    Convergence {
        #[command(flatten)]
        overrides: Overrides,
        /// Comma-separated step sizes.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        h_list: Option<Vec<f64>>,
        /// Integration horizon.
        #[arg(long, allow_negative_numbers = true)]
        final_time: Option<f64>,
    },
    /// Run verification suites and write a JSON report.
    Verify {
        #[arg(value_enum)]
        which: VerifyTarget,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Compare DEL, Hamilton-Pontryagin and Leok-Ohsawa boundary value solutions.
    CompareLeokOhsawa(Overrides),
}

#[derive(Debug, Args)]
struct Overrides {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// System name, when running without a config file or to override it.
    #[arg(long)]
    system: Option<String>,
    /// Step size.
    #[arg(long, allow_negative_numbers = true)]
    h: Option<f64>,
    /// Number of steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Seed for randomized suites.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match (&self.config, &self.system) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(name)) => RunConfig::for_system(name),
            (None, None) => {
                return Err(CliError::Config(
                    "give a configuration with --config or a system with --system".into(),
                ))
            }
        };
        if let Some(name) = &self.system {
            cfg.system = name.clone();
        }
        if let Some(h) = self.h {
            cfg.h = h;
        }
        if let Some(steps) = self.steps {
            cfg.steps = steps;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(command: Command) -> Result<bool, CliError> {
    match command {
        Command::Simulate(o) => {
            simulate(&o.resolve()?)?;
            Ok(true)
        }
        Command::Convergence {
            overrides,
            h_list,
            final_time,
        } => {
            let mut cfg = overrides.resolve()?;
            if h_list.is_some() {
                cfg.h_list = h_list;
            }
            if let Some(t) = final_time {
                cfg.final_time = t;
            }
            cfg.validate()?;
            let report = convergence(&cfg)?;
            commands::write_json(&report, cfg.out.as_deref())?;
            Ok(true)
        }
        Command::Verify { which, overrides } => {
            let cfg = overrides.resolve()?;
            let report = verify(&cfg, which)?;
            commands::write_json(&report, cfg.out.as_deref())?;
            Ok(report.pass)
        }
        Command::CompareLeokOhsawa(o) => {
            let cfg = o.resolve()?;
            let report = compare_leok_ohsawa(&cfg)?;
            commands::write_json(&report, cfg.out.as_deref())?;
            Ok(report.pass)
        }
    }
}

/// Parse arguments, run the command and return the process exit code.
/// Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match panic::catch_unwind(AssertUnwindSafe(|| execute(cli.command))) {
        Ok(Ok(true)) => 0,
        Ok(Ok(false)) => {
            eprintln!("verification failed");
            1
        }
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(_) => {
            eprintln!("error: internal failure while running the command");
            3
        }
    }
}

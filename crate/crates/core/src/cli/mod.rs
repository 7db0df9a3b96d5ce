//! Batch command surface behind the `spinlab` binary: phase diagrams, identity
//! audits and simulation drivers, each writing CSV/JSON artifacts and a
//! manifest into an output directory.
//!
//! Exit codes: 0 success, 1 audit or validation failure, 2 usage error.

mod audit;
mod config;
mod output;
mod phase;
mod simulate;

pub use audit::{envelope_grid, run_audit, AuditSummary};
pub use config::Config;
pub use output::{write_atomic, OutputDir, RunManifest};
pub use phase::{run_phase_diagram, PhaseRow};
pub use simulate::{run_simulate, SimKind};

use crate::analytics::AnalyticsError;
use crate::sim::SimError;
use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("audit failed: {0}")]
    AuditFailed(String),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Sim(SimError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidArgument { what, detail } => CliError::Config { key: what.to_string(), msg: detail },
            SimError::Analytics(a) => CliError::Analytics(a),
            other => CliError::Sim(other),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "spinlab", version, about = "Spherical p-spin phase portraits and Langevin experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// BBM maximum and shattering certificate on a temperature grid.
    PhaseDiagram {
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long, default_value_t = 0.5)]
        tmin: f64,
        #[arg(long, default_value_t = 1.2)]
        tmax: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Randomized identity audits plus the envelope audit over the window.
    Audit {
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative perturbation of the closed forms (negative control).
        #[arg(long, default_value_t = 0.0, hide = true)]
        tamper: f64,
    },
    /// Monte Carlo experiments driven by a key = value config file.
    Simulate {
        #[arg(value_enum)]
        kind: SimKind,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Accept q different from q*(E, 1/T).
        #[arg(long)]
        r#override: bool,
    },
}

fn configure_threads() {
    if let Some(n) = std::env::var("SPINLAB_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        // fails only if the pool already exists, e.g. on a second call in-process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::PhaseDiagram { p, tmin, tmax, points, out } => run_phase_diagram(p, tmin, tmax, points, &out).map(drop),
        Command::Audit { p, samples, out, seed, tamper } => run_audit(p, samples, seed, tamper, &out).map(drop),
        Command::Simulate { kind, config, out, seed, r#override } => {
            run_simulate(kind, &config, &out, seed, r#override).map(drop)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code; diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("spinlab: {e}");
            e.exit_code()
        }
    }
}

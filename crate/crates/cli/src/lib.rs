//! Command-line driver for the `memstab` toolkit.
//!
//! Exit codes: 0 all checks pass, 1 a verification check failed, 2 the model
//! admits no certificate, 3 configuration or I/O error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::Outcome;
pub use config::{parse_config, ModelSection, RunConfig, VerifyOptions};

pub const EXIT_CONFIG: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at `{key}` (line {line}, column {column}): {message}")]
    Parse {
        key: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Artifact { path: PathBuf, message: String },
    #[error(transparent)]
    Core(memstab::Error),
    #[error("--config is required for this command")]
    MissingConfig,
}

const CONFIG_HELP: &str = "\
CONFIG (JSON, unknown keys rejected):
  model        nu, b1, b2, k (required); k1, k2 (time functions, default 0);
               p_coeffs [] ; phi {\"constant\": [1.0]}; n_modes 16;
               rho, tau (default 1/(1+|sin t|), 1/(1+|cos t|), r = 1)
  sim          dt 1/1024; T 10; n_paths 200; master_seed 20240601;
               output_stride 8; workers (all cores)
  certificate  gamma1_fraction 0.1; safety 0.95; bisection_tol 1e-9;
               r3_weight \"sigma1\" | \"sigma\"
  verify       ci_mult 3; window_fraction 0.5; n0 2; min_rate_ratio 0.8
  output_dir   \"memstab-out\" (\"memstab-demo\" for demo)

EXIT CODES: 0 pass, 1 check failed, 2 infeasible, 3 config or I/O error";

#[derive(Debug, Parser)]
#[command(name = "memstab", version, about = "Certify and test exponential decay of a delayed stochastic heat equation", after_help = CONFIG_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the hypotheses and write certificate.json.
    Certify,
    /// Run the Monte Carlo study and write curve.csv and paths_summary.csv.
    Simulate,
    /// Certify, simulate (or reuse), run all checks and write report.json.
    Verify {
        /// Read curve.csv and paths_summary.csv from the output directory.
        #[arg(long)]
        reuse: bool,
    },
    /// Energy-identity residuals over four halvings of dt; writes energy.json.
    EnergyCheck,
    /// Full verification of the built-in feasible instance.
    Demo,
}

#[derive(Debug, Args, Default)]
pub struct Overrides {
    /// Path to the JSON config.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Number of Monte Carlo paths.
    #[arg(long, global = true, value_name = "N")]
    pub paths: Option<usize>,
    /// Time step.
    #[arg(long, global = true, value_name = "F")]
    pub dt: Option<f64>,
    /// Number of sine modes.
    #[arg(long, global = true, value_name = "N")]
    pub modes: Option<usize>,
    /// Worker threads.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(s) = self.seed {
            cfg.sim.master_seed = s;
        }
        if let Some(n) = self.paths {
            cfg.sim.n_paths = n;
        }
        if let Some(dt) = self.dt {
            cfg.sim.dt = dt;
        }
        if let Some(n) = self.modes {
            cfg.model.n_modes = n;
        }
        if let Some(w) = self.workers {
            cfg.sim.workers = Some(w);
        }
        cfg.validate()
    }
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match (&cli.overrides.config, &cli.command) {
        (Some(path), _) => parse_config(path)?,
        (None, Command::Demo) => RunConfig::demo(),
        (None, _) => return Err(CliError::MissingConfig),
    };
    cli.overrides.apply(&mut cfg)?;
    Ok(cfg)
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = load(cli)?;
    match cli.command {
        Command::Certify => commands::certify(&cfg),
        Command::Simulate => commands::simulate(&cfg),
        Command::Verify { reuse } => commands::verify(&cfg, reuse),
        Command::EnergyCheck => commands::energy_check(&cfg),
        Command::Demo => commands::verify(&cfg, false),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(outcome) => outcome.code(),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

//! The `hpw` command line: `calibrate`, `verify`, `sweep` and `estimate`.
//!
//! Exit codes: 0 success, 1 check failure, 2 usage error, 3 environment or
//! sidecar error. `HPW_THREADS` caps the worker pool.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use log::error;

pub use commands::{
    cmd_calibrate, cmd_estimate, cmd_sweep, load_sidecar, run_estimate, run_sweep, CalibrationSidecar, EstimateOutput,
    PlotRow, SweepOutput, SweepRow, SweepSummary,
};
pub use config::{apply_override, RunConfig};
pub use verify::{cmd_verify, run_suite, CheckResult, Suite};

use crate::error::Error;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Check(String),
    Env(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Check(_) => 1,
            Self::Usage(_) => 2,
            Self::Env(_) => 3,
        }
    }

    pub(crate) fn usage(e: Error) -> Self {
        Self::Usage(e.to_string())
    }

    pub(crate) fn check(e: Error) -> Self {
        Self::Check(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Check(m) => write!(f, "check failed: {m}"),
            Self::Env(m) => write!(f, "environment error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) => Self::Env(e.to_string()),
            _ => Self::Check(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hpw", version, about = "Heisenberg-Pauli-Weyl inequality checks on Heisenberg-type groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override a config entry, e.g. `--set cutoff=24` or `--set grid.nodes_per_panel=16`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for every random choice (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit the Plancherel and inversion constants and write the sidecar.
    Calibrate(Common),
    /// Run a verification suite: group, hermite, fourier, schatten, hpw or all.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Tabulate HPW ratios and tail constants over the inequality grid.
    Sweep(Common),
    /// Minimize the HPW ratio over the estimate family.
    Estimate(Common),
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    if !common.config.is_file() {
        return Err(CliError::Usage(format!("config file {} not found", common.config.display())));
    }
    let mut cfg = RunConfig::load(Some(&common.config), &common.set).map_err(CliError::usage)?;
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("HPW_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Env(format!("HPW_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Env(format!("cannot size the thread pool: {e}")))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::Calibrate(c) => {
            let cfg = load(&c)?;
            let sc = cmd_calibrate(&cfg)?;
            let k = &sc.calibration;
            println!(
                "C = {:.9}  kappa = {:.9}  residuals {:.3e} {:.3e}  -> {}",
                k.constants.plancherel_c,
                k.constants.inversion_kappa,
                k.plancherel_residual,
                k.inversion_residual,
                cfg.sidecar_path().display()
            );
        }
        Command::Verify { common, suite } => {
            let suite: Suite = suite.parse().map_err(CliError::Usage)?;
            let cfg = load(&common)?;
            let results = cmd_verify(&cfg, suite)?;
            for r in &results {
                println!("{} {}/{}: {}", if r.passed { "PASS" } else { "FAIL" }, r.suite, r.check, r.detail);
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} checks, {failed} failed", results.len());
            if failed > 0 {
                return Err(CliError::Check(format!("{failed} verification checks failed")));
            }
        }
        Command::Sweep(c) => {
            let cfg = load(&c)?;
            let out = cmd_sweep(&cfg)?;
            println!(
                "{} rows, min ratio {:.6} (p = {}, beta = {}, gamma = {}, member {}), max dilation residual {:.3e} -> {}",
                out.summary.rows,
                out.summary.min_ratio,
                out.summary.argmin.p,
                out.summary.argmin.beta,
                out.summary.argmin.gamma,
                out.summary.argmin.family_index,
                out.summary.max_dilation_residual,
                cfg.out.display()
            );
        }
        Command::Estimate(c) => {
            let cfg = load(&c)?;
            let out = cmd_estimate(&cfg)?;
            println!(
                "min ratio {:.6} at theta = {:?} after {} evaluations -> {}",
                out.report.min_ratio,
                out.report.argmin,
                out.report.evaluations,
                cfg.out.join("estimate.json").display()
            );
        }
    }
    Ok(())
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            error!("{e}");
            eprintln!("hpw: {e}");
            e.exit_code()
        }
    }
}

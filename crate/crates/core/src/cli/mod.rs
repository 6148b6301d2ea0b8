//! Command-line front end.
//!
//! ```text
//! cmnalm solve      --instance F [--params F] --out D
//! cmnalm experiment --config F --out D [--workers N] [--seed S]
//! cmnalm plot       --results F --out F [--highlight VARIANT] [--baseline VARIANT]
//! ```
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 numerical diagnostic.
//! The default worker count comes from `CMNALM_WORKERS` when set.

pub mod io;
pub mod plot;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::experiments::{run_experiment, ExperimentConfig, ExperimentKind};
use crate::solver::{solve_cmn_alm, SolverConfig};

use io::{InstanceFile, RunManifest, SolutionFile, Summary};
use plot::PlotSpec;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "CMNALM_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "cmnalm", version, about = "Sparse recovery under impulsive noise with a continuous mixed-norm fidelity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance.
    Solve(SolveArgs),
    /// Run a Monte-Carlo experiment from a JSON config.
    Experiment(ExperimentArgs),
    /// Render results.csv as an SVG chart.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance JSON (`rows`, `cols`, row-major `a`, `y`, `sigma_n`).
    #[arg(long)]
    pub instance: PathBuf,
    /// Solver parameter JSON; defaults when omitted.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    /// Overrides the config's master seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// results.csv written by `experiment`; a summary.json beside it is used
    /// for the axis kind and baseline when present.
    #[arg(long)]
    pub results: PathBuf,
    /// Output SVG file.
    #[arg(long)]
    pub out: PathBuf,
    /// Series whose preference region over the baseline is shaded.
    #[arg(long)]
    pub highlight: Option<String>,
    #[arg(long)]
    pub baseline: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags, unreadable or invalid input, failed writes.
    Usage(String),
    /// The solver stopped on a numerical problem.
    Diagnostic(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Diagnostic(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Diagnostic(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonFinite { .. } | Error::Singular => CliError::Diagnostic(e.to_string()),
            Error::Dimension { .. } | Error::InvalidArgument(_) => CliError::Usage(e.to_string()),
        }
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code. Errors are reported on standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Plot(a) => cmd_plot(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let instance_text = io::read_to_string(&args.instance)?;
    let instance: InstanceFile = serde_json::from_str(&instance_text)
        .map_err(|e| CliError::Usage(format!("invalid JSON in {}: {e}", args.instance.display())))?;
    let problem = instance.into_problem()?;
    let config: SolverConfig = match &args.params {
        Some(p) => io::read_json(p)?,
        None => SolverConfig::default(),
    };
    config.validate()?;

    let report = solve_cmn_alm(&problem, &config)?;
    for w in &report.warnings {
        log::warn!("{w}");
    }

    io::create_dir(&args.out)?;
    io::write_json(&args.out.join(io::X_HAT_JSON), &SolutionFile::from(&report))?;
    io::write_history(&args.out.join(io::HISTORY_CSV), &report.history)?;

    let config_json = serde_json::to_value(&config).map_err(|e| CliError::Usage(e.to_string()))?;
    let hash_input = format!("{}\n{}", io::sha256_hex(instance_text.as_bytes()), config_json);
    let manifest = RunManifest::new(
        "solve",
        args.params.as_deref().unwrap_or(Path::new("")),
        &args.out,
        io::sha256_hex(hash_input.as_bytes()),
        serde_json::json!({
            "instance": args.instance.display().to_string(),
            "instance_sha256": io::sha256_hex(instance_text.as_bytes()),
            "solver": config_json,
        }),
    );
    io::write_json(&args.out.join(io::MANIFEST_JSON), &manifest)
}

/// Resolves the worker count: flag or environment, then the config.
fn effective_workers(flag: Option<usize>, cfg: &ExperimentConfig) -> Option<usize> {
    flag.or(cfg.workers).filter(|w| *w > 0)
}

pub fn cmd_experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    let mut cfg: ExperimentConfig = io::read_experiment_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    cfg.validate()?;
    let workers = effective_workers(args.workers, &cfg);
    log::info!(
        "running {:?} experiment: {} trials, {} workers",
        cfg.kind,
        cfg.trials,
        workers.map_or_else(|| "default".to_string(), |w| w.to_string())
    );
    let result = run_experiment(&cfg, workers)?;

    io::create_dir(&args.out)?;
    io::write_results(&args.out.join(io::RESULTS_CSV), &result.rows)?;
    io::write_json(&args.out.join(io::SUMMARY_JSON), &Summary::from(&result))?;
    let mut manifest = RunManifest::new(
        "experiment",
        &args.config,
        &args.out,
        cfg.hash(),
        serde_json::to_value(&cfg).map_err(|e| CliError::Usage(e.to_string()))?,
    );
    manifest.master_seed = Some(cfg.master_seed);
    io::write_json(&args.out.join(io::MANIFEST_JSON), &manifest)
}

pub fn cmd_plot(args: &PlotArgs) -> Result<(), CliError> {
    let rows = io::read_results(&args.results)?;
    let summary: Option<Summary> = args
        .results
        .parent()
        .map(|d| d.join(io::SUMMARY_JSON))
        .filter(|p| p.exists())
        .and_then(|p| io::read_json(&p).ok());

    let kind = summary.as_ref().map(|s| s.kind);
    let log_x = match kind {
        Some(k) => k == ExperimentKind::NoiseSweep,
        None => plot::guess_log_axis(&rows),
    };
    let x_label = match kind {
        Some(ExperimentKind::Preference) => "p",
        Some(ExperimentKind::NoiseSweep) => "gamma",
        Some(ExperimentKind::CsSweep) => "m/n",
        None => "grid value",
    };
    let series = plot::group_series(&rows);
    let baseline = args
        .baseline
        .clone()
        .or_else(|| summary.as_ref().and_then(|s| s.baseline.clone()));
    let highlight = args.highlight.clone().or_else(|| {
        summary
            .as_ref()
            .and_then(|s| s.preference.first().map(|p| p.variant.clone()))
    });
    for label in highlight.iter().chain(baseline.iter()) {
        if !series.iter().any(|s| &s.label == label) {
            return Err(CliError::Usage(format!("no series named {label:?} in {}", args.results.display())));
        }
    }
    let spec = PlotSpec { x_label: x_label.to_string(), log_x, highlight, baseline };
    io::write_all(&args.out, plot::render_svg(&series, &spec).as_bytes())
}

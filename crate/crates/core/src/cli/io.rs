//! File formats read and written by the command-line tool.
//!
//! | file            | format | contents                                             |
//! |-----------------|--------|------------------------------------------------------|
//! | instance        | JSON   | `rows`, `cols`, row-major `a`, `y`, `sigma_n`        |
//! | solver params   | JSON   | [`SolverConfig`]; omitted fields take defaults       |
//! | `x_hat.json`    | JSON   | [`SolutionFile`]                                     |
//! | `history.csv`   | CSV    | `iter,primal,dual,objective,mu`                      |
//! | experiment cfg  | JSON   | [`ExperimentConfig`]                                 |
//! | `results.csv`   | CSV    | `variant,grid_value,mean_snr_db,sd_snr_db,n_trials,n_failed` |
//! | `summary.json`  | JSON   | [`Summary`]                                          |
//! | `manifest.json` | JSON   | [`RunManifest`]                                      |
//!
//! Empty `mean_snr_db`/`sd_snr_db` cells mark a grid point where every trial
//! failed.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CliError;
use crate::experiments::{ExperimentConfig, ExperimentKind, ExperimentResult, PreferenceRatio, Provenance, ResultRow};
use crate::linalg::DenseMatrix;
use crate::solver::{IterationRecord, Problem, SolveReport};

pub const RESULTS_CSV: &str = "results.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const MANIFEST_JSON: &str = "manifest.json";
pub const X_HAT_JSON: &str = "x_hat.json";
pub const HISTORY_CSV: &str = "history.csv";

/// On-disk form of a [`Problem`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries of `A`.
    pub a: Vec<f64>,
    pub y: Vec<f64>,
    pub sigma_n: f64,
}

impl InstanceFile {
    pub fn from_problem(p: &Problem) -> Self {
        Self {
            rows: p.a.rows(),
            cols: p.a.cols(),
            a: p.a.data().to_vec(),
            y: p.y.clone(),
            sigma_n: p.sigma_n,
        }
    }

    pub fn into_problem(self) -> crate::Result<Problem> {
        Problem::new(DenseMatrix::new(self.rows, self.cols, self.a)?, self.y, self.sigma_n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub x_hat: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub lambda0: f64,
    pub warnings: Vec<String>,
}

impl From<&SolveReport> for SolutionFile {
    fn from(r: &SolveReport) -> Self {
        Self {
            x_hat: r.x_hat.clone(),
            iterations: r.iterations,
            converged: r.converged,
            lambda0: r.lambda0,
            warnings: r.warnings.clone(),
        }
    }
}

/// Everything in an [`ExperimentResult`] except the per-cell rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub kind: ExperimentKind,
    pub axis: String,
    pub series: Vec<String>,
    pub baseline: Option<String>,
    pub preference: Vec<PreferenceRatio>,
    pub failed_solves: usize,
    pub provenance: Provenance,
}

impl From<&ExperimentResult> for Summary {
    fn from(r: &ExperimentResult) -> Self {
        let mut series: Vec<String> = Vec::new();
        for row in &r.rows {
            if !series.contains(&row.variant) {
                series.push(row.variant.clone());
            }
        }
        Self {
            kind: r.kind,
            axis: r.axis.clone(),
            series,
            baseline: r.baseline.clone(),
            preference: r.preference.clone(),
            failed_solves: r.failed_solves,
            provenance: r.provenance.clone(),
        }
    }
}

/// Written next to every output; enough to rerun the command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: String,
    pub master_seed: Option<u64>,
    pub out_dir: String,
    pub tool_version: String,
    /// SHA-256 of the effective configuration.
    pub config_hash: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    /// The effective configuration, inline.
    pub config: serde_json::Value,
}

impl RunManifest {
    pub fn new(command: &str, config_path: &Path, out_dir: &Path, config_hash: String, config: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            config_path: config_path.display().to_string(),
            master_seed: None,
            out_dir: out_dir.display().to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash,
            timestamp: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            config,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read_to_string(path: &Path) -> Result<String, CliError> {
    let mut s = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut s))
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(s)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid JSON in {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Usage(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("cannot write {}: {e}", path.display()))
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for r in rows {
        w.serialize(r).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// `history.csv`. The header is written even for an empty history.
pub fn write_history(path: &Path, history: &[IterationRecord]) -> Result<(), CliError> {
    if history.is_empty() {
        return fs::write(path, "iter,primal,dual,objective,mu\n").map_err(|e| io_error(path, e));
    }
    write_csv(path, history)
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<(), CliError> {
    write_csv(path, rows)
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>, CliError> {
    let file = File::open(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut rdr = csv::Reader::from_reader(file);
    let rows = rdr
        .deserialize()
        .collect::<Result<Vec<ResultRow>, _>>()
        .map_err(|e| CliError::Usage(format!("invalid results CSV {}: {e}", path.display())))?;
    if rows.is_empty() {
        return Err(CliError::Usage(format!("{} holds no rows", path.display())));
    }
    Ok(rows)
}

pub fn write_all(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    File::create(path)
        .and_then(|mut f| f.write_all(bytes))
        .map_err(|e| io_error(path, e))
}

/// Reads an experiment config; used by the CLI and by examples.
pub fn read_experiment_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    read_json(path)
}

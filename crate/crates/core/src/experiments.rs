//! Monte-Carlo benchmark protocol.
//!
//! Each trial draws a `k`-sparse Gaussian signal, a Gaussian measurement
//! matrix and SαS noise from streams keyed by `(master_seed, trial_index)`,
//! solves the instance with every configured method, and records the
//! recovery SNR. Trials run in parallel; aggregation always walks trials in
//! index order, so results do not depend on the worker count.
//!
//! Three experiment families are provided:
//!
//! * [`ExperimentKind::Preference`]: CMN variants against the ℓp baseline
//!   over a grid of `p`, summarized as preference ratios;
//! * [`ExperimentKind::NoiseSweep`]: SNR against the noise scale γ;
//! * [`ExperimentKind::CsSweep`]: SNR against the measurement ratio `m/n`.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cmn::CmnParams;
use crate::error::{Error, Result};
use crate::linalg::{dist2, norm2, spectral_norm_sq, DenseMatrix};
use crate::rng::{stream_rng, trial_stream};
use crate::solver::{lp_config, solve_cmn_alm, Problem, SolverConfig};
use crate::stable_noise::{standard_sas, StableNoiseParams};

/// SNR reported for an exact reconstruction.
pub const SNR_CAP_DB: f64 = 300.0;

/// Power iterations used when normalizing a matrix to unit spectral norm.
pub const NORMALIZE_POWER_ITERS: usize = 500;

const TAG_SIGNAL: u16 = 0;
const TAG_MATRIX: u16 = 1;
const TAG_NOISE: u16 = 2;

/// Label of the ℓp baseline series in preference experiments.
pub const BASELINE_LABEL: &str = "Lp-ADM";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixNorm {
    /// Raw standard-normal entries.
    None,
    /// Scaled so that `‖A‖₂ = 1`.
    UnitSpectral,
    /// Entries scaled by `1/√m`.
    InvSqrtM,
}

/// `k` nonzeros on a uniformly random support, values i.i.d. `N(0, 1)`.
pub fn gen_sparse_signal_with<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Vec<f64>> {
    if k > n {
        return Err(Error::invalid(format!("sparsity {k} exceeds length {n}")));
    }
    let mut x = vec![0.0; n];
    let support = sample_indices(rng, n, k).into_vec();
    for i in support {
        x[i] = rng.sample(StandardNormal);
    }
    Ok(x)
}

pub fn gen_sparse_signal(n: usize, k: usize, seed: u64) -> Result<Vec<f64>> {
    gen_sparse_signal_with(n, k, &mut stream_rng(seed, 0))
}

/// `m × n` matrix of i.i.d. `N(0, 1)` entries, normalized per `norm`.
pub fn gen_gaussian_matrix_with<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    norm: MatrixNorm,
    rng: &mut R,
) -> Result<DenseMatrix> {
    let data: Vec<f64> = (0..m * n).map(|_| rng.sample(StandardNormal)).collect();
    let a = DenseMatrix::new(m, n, data)?;
    Ok(match norm {
        MatrixNorm::None => a,
        MatrixNorm::InvSqrtM => a.scaled(1.0 / (m as f64).sqrt()),
        MatrixNorm::UnitSpectral => {
            let s = spectral_norm_sq(&a, NORMALIZE_POWER_ITERS, 0).value;
            a.scaled(1.0 / s.sqrt())
        }
    })
}

pub fn gen_gaussian_matrix(m: usize, n: usize, norm: MatrixNorm, seed: u64) -> Result<DenseMatrix> {
    gen_gaussian_matrix_with(m, n, norm, &mut stream_rng(seed, 0))
}

/// `20·log10(‖x_true‖₂ / ‖x_hat − x_true‖₂)`, capped at [`SNR_CAP_DB`].
pub fn snr_db(x_true: &[f64], x_hat: &[f64]) -> Result<f64> {
    Error::check_len("estimate", x_true.len(), x_hat.len())?;
    let signal = norm2(x_true);
    if signal == 0.0 {
        return Err(Error::invalid("SNR is undefined for a zero reference signal"));
    }
    let err = dist2(x_true, x_hat);
    if err == 0.0 {
        return Ok(SNR_CAP_DB);
    }
    Ok((20.0 * (signal / err).log10()).min(SNR_CAP_DB))
}

/// Everything needed to regenerate one Monte-Carlo instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub noise: StableNoiseParams,
    pub matrix_norm: MatrixNorm,
    pub master_seed: u64,
    pub trial_index: u64,
    /// Selects the matrix and noise streams when one trial holds several
    /// instance shapes (the `m/n` sweep); 0 otherwise.
    pub cell: u16,
}

/// A generated instance `y = A·x_true + noise`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub x_true: Vec<f64>,
    pub a: DenseMatrix,
    pub noise: Vec<f64>,
    pub y: Vec<f64>,
}

impl Instance {
    pub fn generate(spec: &TrialSpec) -> Result<Self> {
        spec.noise.validate()?;
        if spec.m == 0 || spec.n == 0 {
            return Err(Error::invalid("instance dimensions must be positive"));
        }
        let t = spec.trial_index;
        let x_true = gen_sparse_signal_with(
            spec.n,
            spec.k,
            &mut stream_rng(spec.master_seed, trial_stream(t, TAG_SIGNAL)),
        )?;
        let a = gen_gaussian_matrix_with(
            spec.m,
            spec.n,
            spec.matrix_norm,
            &mut stream_rng(spec.master_seed, trial_stream(t, cell_tag(TAG_MATRIX, spec.cell))),
        )?;
        // Unit-scale draws times γ: a γ sweep reuses the same underlying draws.
        let mut noise_rng = stream_rng(spec.master_seed, trial_stream(t, cell_tag(TAG_NOISE, spec.cell)));
        let noise: Vec<f64> = (0..spec.m)
            .map(|_| spec.noise.gamma * standard_sas(spec.noise.alpha, &mut noise_rng))
            .collect();
        let y = a.matvec(&x_true)?.iter().zip(&noise).map(|(s, e)| s + e).collect();
        Ok(Self { x_true, a, noise, y })
    }

    /// Whether `y` equals `A·x_true + noise` exactly.
    pub fn is_consistent(&self) -> bool {
        match self.a.matvec(&self.x_true) {
            Ok(ax) => ax
                .iter()
                .zip(&self.noise)
                .zip(&self.y)
                .all(|((s, e), y)| s + e == *y),
            Err(_) => false,
        }
    }

    pub fn problem(&self, sigma_n: f64) -> Result<Problem> {
        Problem::new(self.a.clone(), self.y.clone(), sigma_n)
    }
}

fn cell_tag(base: u16, cell: u16) -> u16 {
    base + 2 * cell
}

/// Recovery method evaluated in an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Method {
    Cmn { p_s: f64, p_f: f64, q: f64 },
    Lp { p: f64 },
}

impl Method {
    /// Solver configuration for this method, inheriting everything but the
    /// norm range from `base`.
    pub fn config(&self, base: &SolverConfig) -> Result<SolverConfig> {
        match *self {
            Method::Cmn { p_s, p_f, q } => {
                Ok(base.clone().with_cmn(CmnParams::new(p_s, p_f, q, base.cmn.eps)?))
            }
            Method::Lp { p } => lp_config(p, base),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variant {
    pub label: String,
    #[serde(flatten)]
    pub method: Method,
}

impl Variant {
    pub fn cmn(p_s: f64, p_f: f64, q: f64) -> Self {
        Self {
            label: format!("CMN({p_s},{p_f},{q})"),
            method: Method::Cmn { p_s, p_f, q },
        }
    }

    pub fn lp(p: f64) -> Self {
        Self {
            label: format!("{BASELINE_LABEL}(p={p})"),
            method: Method::Lp { p },
        }
    }
}

/// The three CMN variants `(0,1,1)`, `(0,1,2)`, `(0,2,2)`.
pub fn default_variants() -> Vec<Variant> {
    vec![
        Variant::cmn(0.0, 1.0, 1.0),
        Variant::cmn(0.0, 1.0, 2.0),
        Variant::cmn(0.0, 2.0, 2.0),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Preference,
    NoiseSweep,
    CsSweep,
}

impl ExperimentKind {
    /// Name of the grid axis, as written to result files.
    pub fn axis(&self) -> &'static str {
        match self {
            ExperimentKind::Preference => "p",
            ExperimentKind::NoiseSweep => "gamma",
            ExperimentKind::CsSweep => "m_over_n",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_n")]
    pub n: usize,
    /// Measurement count; ignored by the `m/n` sweep.
    #[serde(default)]
    pub m: Option<usize>,
    pub k: usize,
    pub alpha: f64,
    /// Noise scale; ignored by the γ sweep.
    #[serde(default)]
    pub gamma: Option<f64>,
    /// Sweep axis: `p` values, γ values, or `m/n` ratios.
    pub grid: Vec<f64>,
    /// ℓp baselines for the γ and `m/n` sweeps.
    #[serde(default)]
    pub baseline_p: Vec<f64>,
    #[serde(default = "default_variants")]
    pub variants: Vec<Variant>,
    #[serde(default = "default_norm")]
    pub matrix_norm: MatrixNorm,
    #[serde(default = "default_sigma_n")]
    pub sigma_n: f64,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Worker threads; `None` lets the caller decide.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

fn default_trials() -> usize {
    60
}
fn default_n() -> usize {
    128
}
fn default_norm() -> MatrixNorm {
    MatrixNorm::UnitSpectral
}
fn default_sigma_n() -> f64 {
    1.0
}

/// `start, start + step, …` up to and including `stop` (within rounding).
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| {
            let v = start + i as f64 * step;
            (v * 1e12).round() / 1e12
        })
        .collect()
}

impl ExperimentConfig {
    /// Preference-ratio experiment: `n = 128`, `m = 50`, `k = 7`, p-grid
    /// `0.1:0.1:1.9`.
    pub fn preference(alpha: f64, gamma: f64) -> Self {
        Self {
            kind: ExperimentKind::Preference,
            trials: default_trials(),
            master_seed: 0,
            n: 128,
            m: Some(50),
            k: 7,
            alpha,
            gamma: Some(gamma),
            grid: linear_grid(0.1, 1.9, 0.1),
            baseline_p: Vec::new(),
            variants: default_variants(),
            matrix_norm: default_norm(),
            sigma_n: 1.0,
            solver: SolverConfig::default(),
            workers: None,
        }
    }

    /// SNR against γ ∈ {1e-4, 1e-3, 1e-2, 1e-1} with ℓp baselines at
    /// `p ∈ {0.5, 1, 1.5}`.
    pub fn noise_sweep(alpha: f64) -> Self {
        Self {
            kind: ExperimentKind::NoiseSweep,
            gamma: None,
            grid: vec![1e-4, 1e-3, 1e-2, 1e-1],
            baseline_p: vec![0.5, 1.0, 1.5],
            ..Self::preference(alpha, 1e-3)
        }
    }

    /// SNR against `m/n ∈ {0.1, …, 0.9}` for 8-sparse signals of length 128.
    pub fn cs_sweep(alpha: f64, gamma: f64) -> Self {
        Self {
            kind: ExperimentKind::CsSweep,
            m: None,
            k: 8,
            grid: linear_grid(0.1, 0.9, 0.1),
            baseline_p: vec![0.5, 1.0, 1.5],
            ..Self::preference(alpha, gamma)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.k > self.n || self.n == 0 {
            return Err(Error::invalid(format!("need 0 <= k <= n, n > 0 (k={}, n={})", self.k, self.n)));
        }
        if self.variants.is_empty() {
            return Err(Error::invalid("at least one variant is required"));
        }
        if self.grid.is_empty() || self.grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("grid must be nonempty and strictly increasing"));
        }
        if !(self.sigma_n > 0.0) {
            return Err(Error::invalid("sigma_n must be positive"));
        }
        self.solver.validate()?;
        for v in &self.variants {
            v.method.config(&self.solver)?;
        }
        for &p in &self.baseline_p {
            lp_config(p, &self.solver)?;
        }
        let need_m = || self.m.filter(|m| *m > 0).ok_or_else(|| Error::invalid("m is required"));
        let need_gamma = || {
            self.gamma
                .ok_or_else(|| Error::invalid("gamma is required"))
                .and_then(|g| StableNoiseParams::new(self.alpha, g))
        };
        match self.kind {
            ExperimentKind::Preference => {
                need_m()?;
                need_gamma()?;
                if self.grid.iter().any(|p| !(*p > 0.0 && *p < 2.0)) {
                    return Err(Error::invalid("p-grid must lie in (0, 2)"));
                }
            }
            ExperimentKind::NoiseSweep => {
                need_m()?;
                for g in &self.grid {
                    StableNoiseParams::new(self.alpha, *g)?;
                }
            }
            ExperimentKind::CsSweep => {
                need_gamma()?;
                if self.grid.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
                    return Err(Error::invalid("m/n grid must lie in (0, 1]"));
                }
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, excluding the worker count.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.workers = None;
        let json = serde_json::to_string(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    fn measurements_at(&self, grid_index: usize) -> usize {
        match self.kind {
            ExperimentKind::CsSweep => ((self.grid[grid_index] * self.n as f64).round() as usize).max(1),
            _ => self.m.unwrap_or(0),
        }
    }
}

/// Mean and spread of one (series, grid point) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub variant: String,
    pub grid_value: f64,
    /// `None` when every trial failed.
    pub mean_snr_db: Option<f64>,
    pub sd_snr_db: Option<f64>,
    pub n_trials: usize,
    pub n_failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceRatio {
    pub variant: String,
    /// Percentage of grid points where the variant's mean SNR is at least
    /// the baseline's.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub master_seed: u64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub kind: ExperimentKind,
    pub axis: String,
    pub rows: Vec<ResultRow>,
    /// Filled for preference experiments only.
    pub preference: Vec<PreferenceRatio>,
    /// Series the preference ratios compare against.
    pub baseline: Option<String>,
    /// Total failed solves across all cells.
    pub failed_solves: usize,
    pub provenance: Provenance,
}

impl ExperimentResult {
    /// Rows of one series, in grid order.
    pub fn series(&self, label: &str) -> Vec<&ResultRow> {
        self.rows.iter().filter(|r| r.variant == label).collect()
    }

    pub fn mean(&self, label: &str, grid_value: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.variant == label && r.grid_value == grid_value)
            .and_then(|r| r.mean_snr_db)
    }
}

/// `100·|{g : variant ≥ baseline[g]}| / |grid|`. A missing baseline mean
/// counts as a win, a missing variant mean as a loss everywhere.
pub fn preference_ratio(variant_mean: Option<f64>, baseline_means: &[Option<f64>]) -> f64 {
    if baseline_means.is_empty() {
        return 0.0;
    }
    let Some(v) = variant_mean else { return 0.0 };
    let wins = baseline_means
        .iter()
        .filter(|b| b.map_or(true, |b| v >= b))
        .count();
    100.0 * wins as f64 / baseline_means.len() as f64
}

/// One solve performed in every trial.
#[derive(Debug, Clone)]
struct Cell {
    series: usize,
    grid_index: usize,
    instance_cell: usize,
    config: SolverConfig,
}

struct Plan {
    series: Vec<String>,
    /// Instance shapes per trial: `(m, gamma, cell)`.
    instances: Vec<(usize, f64, u16)>,
    cells: Vec<Cell>,
    /// Series whose single value is repeated across the grid.
    constant_series: Vec<bool>,
}

fn build_plan(cfg: &ExperimentConfig) -> Result<Plan> {
    let mut series: Vec<String> = cfg.variants.iter().map(|v| v.label.clone()).collect();
    let mut constant_series = vec![false; series.len()];
    let mut instances = Vec::new();
    let mut cells = Vec::new();
    let variant_configs: Vec<SolverConfig> = cfg
        .variants
        .iter()
        .map(|v| v.method.config(&cfg.solver))
        .collect::<Result<_>>()?;

    match cfg.kind {
        ExperimentKind::Preference => {
            let gamma = cfg.gamma.unwrap_or_default();
            instances.push((cfg.measurements_at(0), gamma, 0));
            for (s, c) in variant_configs.iter().enumerate() {
                constant_series[s] = true;
                cells.push(Cell { series: s, grid_index: 0, instance_cell: 0, config: c.clone() });
            }
            let base = series.len();
            series.push(BASELINE_LABEL.to_string());
            constant_series.push(false);
            for (g, &p) in cfg.grid.iter().enumerate() {
                cells.push(Cell {
                    series: base,
                    grid_index: g,
                    instance_cell: 0,
                    config: lp_config(p, &cfg.solver)?,
                });
            }
        }
        ExperimentKind::NoiseSweep | ExperimentKind::CsSweep => {
            let baselines: Vec<Variant> = cfg.baseline_p.iter().map(|&p| Variant::lp(p)).collect();
            let mut configs = variant_configs;
            for b in &baselines {
                series.push(b.label.clone());
                constant_series.push(false);
                configs.push(b.method.config(&cfg.solver)?);
            }
            for (g, &value) in cfg.grid.iter().enumerate() {
                let (gamma, cell) = match cfg.kind {
                    ExperimentKind::NoiseSweep => (value, 0),
                    _ => (cfg.gamma.unwrap_or_default(), g as u16),
                };
                instances.push((cfg.measurements_at(g), gamma, cell));
                for (s, c) in configs.iter().enumerate() {
                    cells.push(Cell { series: s, grid_index: g, instance_cell: g, config: c.clone() });
                }
            }
        }
    }
    Ok(Plan { series, instances, cells, constant_series })
}

fn run_trial(cfg: &ExperimentConfig, plan: &Plan, trial_index: usize) -> Result<Vec<Option<f64>>> {
    let problems = plan
        .instances
        .iter()
        .map(|&(m, gamma, cell)| {
            let spec = TrialSpec {
                n: cfg.n,
                m,
                k: cfg.k,
                noise: StableNoiseParams::new(cfg.alpha, gamma)?,
                matrix_norm: cfg.matrix_norm,
                master_seed: cfg.master_seed,
                trial_index: trial_index as u64,
                cell,
            };
            let inst = Instance::generate(&spec)?;
            debug_assert!(inst.is_consistent());
            let problem = inst.problem(cfg.sigma_n)?;
            Ok((inst.x_true, problem))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(plan
        .cells
        .iter()
        .map(|cell| {
            let (x_true, problem) = &problems[cell.instance_cell];
            let outcome = solve_cmn_alm(problem, &cell.config).and_then(|r| snr_db(x_true, &r.x_hat));
            outcome.ok().filter(|v| v.is_finite())
        })
        .collect())
}

fn mean_sd(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (Some(mean), Some(sd))
}

/// Runs any experiment kind with `workers` threads (`None`: rayon default).
pub fn run_experiment(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<ExperimentResult> {
    cfg.validate()?;
    let plan = build_plan(cfg)?;

    let run_all = || {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, &plan, t))
            .collect::<Result<Vec<_>>>()
    };
    let per_trial = match workers.or(cfg.workers) {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?
            .install(run_all)?,
        None => run_all()?,
    };

    let grid_len = cfg.grid.len();
    let mut rows = Vec::new();
    let mut failed_solves = 0;
    let mut means = vec![vec![None; grid_len]; plan.series.len()];
    for (s, label) in plan.series.iter().enumerate() {
        for (g, &grid_value) in cfg.grid.iter().enumerate() {
            let source_g = if plan.constant_series[s] { 0 } else { g };
            let ci = plan
                .cells
                .iter()
                .position(|c| c.series == s && c.grid_index == source_g)
                .expect("every series has a cell per grid point");
            let values: Vec<f64> = per_trial.iter().filter_map(|t| t[ci]).collect();
            let n_failed = cfg.trials - values.len();
            if g == source_g {
                failed_solves += n_failed;
            }
            let (mean, sd) = mean_sd(&values);
            means[s][g] = mean;
            rows.push(ResultRow {
                variant: label.clone(),
                grid_value,
                mean_snr_db: mean,
                sd_snr_db: sd,
                n_trials: cfg.trials,
                n_failed,
            });
        }
    }
    if failed_solves > 0 {
        log::warn!("{failed_solves} solves failed and were excluded from the means");
    }

    let (preference, baseline) = if cfg.kind == ExperimentKind::Preference {
        let base = &means[plan.series.len() - 1];
        let ratios = cfg
            .variants
            .iter()
            .enumerate()
            .map(|(s, v)| PreferenceRatio {
                variant: v.label.clone(),
                ratio: preference_ratio(means[s][0], base),
            })
            .collect();
        (ratios, Some(BASELINE_LABEL.to_string()))
    } else {
        (Vec::new(), None)
    };

    Ok(ExperimentResult {
        kind: cfg.kind,
        axis: cfg.kind.axis().to_string(),
        rows,
        preference,
        baseline,
        failed_solves,
        provenance: Provenance {
            config_hash: cfg.hash(),
            master_seed: cfg.master_seed,
            trials: cfg.trials,
        },
    })
}

fn expect_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if cfg.kind == kind {
        Ok(())
    } else {
        Err(Error::invalid(format!("expected a {kind:?} config, got {:?}", cfg.kind)))
    }
}

pub fn run_preference_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    expect_kind(cfg, ExperimentKind::Preference)?;
    run_experiment(cfg, None)
}

pub fn run_noise_sweep(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    expect_kind(cfg, ExperimentKind::NoiseSweep)?;
    run_experiment(cfg, None)
}

pub fn run_cs_sweep(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    expect_kind(cfg, ExperimentKind::CsSweep)?;
    run_experiment(cfg, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_signal_support_size() {
        let x = gen_sparse_signal(128, 7, 5).unwrap();
        assert_eq!(x.iter().filter(|v| **v != 0.0).count(), 7);
        assert_eq!(gen_sparse_signal(16, 0, 5).unwrap(), vec![0.0; 16]);
        assert!(gen_sparse_signal(4, 5, 5).is_err());
    }

    #[test]
    fn sparse_support_is_uniform() {
        let (n, k, draws) = (20usize, 3usize, 10_000usize);
        let mut hits = vec![0usize; n];
        let mut rng = stream_rng(77, 0);
        for _ in 0..draws {
            for (i, v) in gen_sparse_signal_with(n, k, &mut rng).unwrap().iter().enumerate() {
                if *v != 0.0 {
                    hits[i] += 1;
                }
            }
        }
        let p = k as f64 / n as f64;
        let mean = draws as f64 * p;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        for h in hits {
            assert!((h as f64 - mean).abs() <= 3.0 * sd + 1.0, "{h} vs {mean}±{sd}");
        }
    }

    #[test]
    fn matrix_normalizations() {
        let a = gen_gaussian_matrix(50, 128, MatrixNorm::UnitSpectral, 3).unwrap();
        let s = spectral_norm_sq(&a, NORMALIZE_POWER_ITERS, 0).value;
        assert!((s - 1.0).abs() <= 1e-4);
        // independent start vector, more iterations
        let s2 = spectral_norm_sq(&a, 5000, 99).value;
        assert!((s2 - 1.0).abs() <= 1e-4);

        let a = gen_gaussian_matrix(50, 128, MatrixNorm::InvSqrtM, 3).unwrap();
        let mut mean_sq = 0.0;
        for j in 0..128 {
            let c: f64 = (0..50).map(|i| a.get(i, j) * a.get(i, j)).sum();
            mean_sq += c / 128.0;
        }
        assert!((mean_sq - 1.0).abs() <= 0.1);

        assert_eq!(
            gen_gaussian_matrix(4, 6, MatrixNorm::None, 1).unwrap(),
            gen_gaussian_matrix(4, 6, MatrixNorm::None, 1).unwrap()
        );
    }

    #[test]
    fn snr_examples() {
        let x = [3.0, 4.0];
        assert_eq!(snr_db(&x, &x).unwrap(), SNR_CAP_DB);
        assert!((snr_db(&x, &[0.0, 0.0]).unwrap()).abs() < 1e-12);
        assert!((snr_db(&x, &[3.3, 4.4]).unwrap() - 20.0).abs() < 1e-9);
        assert!(snr_db(&[0.0, 0.0], &x).is_err());
        assert!(snr_db(&x, &[1.0]).is_err());
    }

    #[test]
    fn preference_ratio_examples() {
        let base = [Some(10.0), Some(12.0), Some(8.0), Some(11.0)];
        assert_eq!(preference_ratio(Some(20.0), &base), 100.0);
        assert_eq!(preference_ratio(Some(1.0), &base), 0.0);
        assert_eq!(preference_ratio(Some(11.0), &base), 75.0);
        assert_eq!(preference_ratio(None, &base), 0.0);
        assert_eq!(preference_ratio(Some(0.0), &[None, Some(1.0)]), 50.0);
    }

    #[test]
    fn linear_grid_matches_decimal_steps() {
        let g = linear_grid(0.1, 1.9, 0.1);
        assert_eq!(g.len(), 19);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[18], 1.9);
        assert_eq!(g[2], 0.3);
    }

    #[test]
    fn instances_are_consistent_and_reproducible() {
        let spec = TrialSpec {
            n: 32,
            m: 16,
            k: 3,
            noise: StableNoiseParams::new(1.0, 1e-2).unwrap(),
            matrix_norm: MatrixNorm::UnitSpectral,
            master_seed: 4,
            trial_index: 2,
            cell: 0,
        };
        let a = Instance::generate(&spec).unwrap();
        assert!(a.is_consistent());
        assert_eq!(a, Instance::generate(&spec).unwrap());
        let other = Instance::generate(&TrialSpec { trial_index: 3, ..spec }).unwrap();
        assert_ne!(a.x_true, other.x_true);
        // a larger γ rescales the same draws
        let louder = Instance::generate(&TrialSpec {
            noise: StableNoiseParams::new(1.0, 1e-1).unwrap(),
            ..spec
        })
        .unwrap();
        for (q, l) in a.noise.iter().zip(&louder.noise) {
            assert!((10.0 * q - l).abs() <= 1e-12 * l.abs().max(1e-300));
        }
        assert_eq!(a.x_true, louder.x_true);
    }

    #[test]
    fn config_validation() {
        let mut c = ExperimentConfig::preference(1.5, 1e-4);
        c.validate().unwrap();
        c.grid = vec![0.5, 0.4];
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::preference(1.5, 1e-4);
        c.variants.clear();
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::cs_sweep(1.5, 1e-3);
        c.validate().unwrap();
        c.grid = vec![0.5, 1.5];
        assert!(c.validate().is_err());
        ExperimentConfig::noise_sweep(0.5).validate().unwrap();
        let mut c = ExperimentConfig::preference(1.5, 1e-4);
        c.k = 200;
        assert!(c.validate().is_err());
        assert!(run_noise_sweep(&ExperimentConfig::preference(1.5, 1e-4)).is_err());
    }

    #[test]
    fn config_json_roundtrip_and_hash() {
        let c = ExperimentConfig::noise_sweep(0.5);
        let json = serde_json::to_string(&c).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
        let mut w = c.clone();
        w.workers = Some(8);
        assert_eq!(w.hash(), c.hash());
        let mut s = c.clone();
        s.master_seed = 1;
        assert_ne!(s.hash(), c.hash());
    }

    #[test]
    fn variant_json_forms() {
        let v: Variant = serde_json::from_str(r#"{"label":"a","p_s":0,"p_f":1,"q":2}"#).unwrap();
        assert_eq!(v.method, Method::Cmn { p_s: 0.0, p_f: 1.0, q: 2.0 });
        let v: Variant = serde_json::from_str(r#"{"label":"b","p":0.5}"#).unwrap();
        assert_eq!(v.method, Method::Lp { p: 0.5 });
    }

    #[test]
    fn small_preference_run_is_well_formed() {
        let mut c = ExperimentConfig::preference(1.5, 1e-4);
        c.trials = 3;
        c.n = 32;
        c.m = Some(16);
        c.k = 2;
        c.grid = vec![0.5, 1.0, 1.5];
        let r = run_preference_experiment(&c).unwrap();
        assert_eq!(r.rows.len(), 4 * 3);
        assert_eq!(r.preference.len(), 3);
        for p in &r.preference {
            assert!((0.0..=100.0).contains(&p.ratio));
            let v = r.mean(&p.variant, 0.5);
            let base: Vec<Option<f64>> = c.grid.iter().map(|g| r.mean(BASELINE_LABEL, *g)).collect();
            assert_eq!(p.ratio, preference_ratio(v, &base));
        }
        // constant variant lines
        let s = r.series("CMN(0,1,1)");
        assert!(s.iter().all(|row| row.mean_snr_db == s[0].mean_snr_db));
    }
}

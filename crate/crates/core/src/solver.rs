//! CMN-ALM: ADMM on the split `z = (Ax − y)/σ_n` with majorize-minimize
//! updates for both blocks.
//!
//! One iteration performs
//!
//! 1. `z ← argmin ℓ_S(z, z⁽ᵏ⁾) + (σ/2)‖v − z‖²`, `v = (Ax⁽ᵏ⁾ − y)/σ_n + η⁽ᵏ⁾/σ`
//!    (weighted soft-thresholding for `q = 1`, diagonal solve for `q = 2`),
//! 2. one ISTA step on the LASSO subproblem in `x` with step `1/(σλ₀)`,
//! 3. `η ← η + σ((Ax⁽ᵏ⁺¹⁾ − y)/σ_n − z⁽ᵏ⁺¹⁾)`,
//! 4. `μ ← max(ζμ, μ_min)`.
//!
//! [`CmnAlm`] exposes the loop one step at a time; [`solve_cmn_alm`] runs it
//! to completion.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cmn::{cmn_value, phi_weight, CmnParams};
use crate::error::{Error, Result};
use crate::linalg::{
    dist2, norm1, norm2, norm_inf, shrink, spectral_norm_sq, DenseMatrix, POWER_ITERS,
};

/// Safety margin applied when λ₀ is derived from the spectral norm.
pub const LAMBDA0_MARGIN: f64 = 1.01;

/// Seed of the power iteration used to bound `‖A‖²`.
const SPECTRAL_SEED: u64 = 0x5eed;

/// A recovery instance `y = Ax + n` with noise scale `σ_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub a: DenseMatrix,
    pub y: Vec<f64>,
    pub sigma_n: f64,
}

impl Problem {
    pub fn new(a: DenseMatrix, y: Vec<f64>, sigma_n: f64) -> Result<Self> {
        let p = Self { a, y, sigma_n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        Error::check_len("observation vector", self.a.rows(), self.y.len())?;
        if !(self.sigma_n > 0.0 && self.sigma_n.is_finite()) {
            return Err(Error::invalid(format!(
                "sigma_n must be positive, got {}",
                self.sigma_n
            )));
        }
        if self.y.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("observations must be finite"));
        }
        Ok(())
    }

    /// Number of measurements.
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    /// Signal length.
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// `(Ax − y)/σ_n`
    pub fn scaled_residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        let ax = self.a.matvec(x)?;
        Ok(ax
            .iter()
            .zip(&self.y)
            .map(|(a, y)| (a - y) / self.sigma_n)
            .collect())
    }
}

/// A knob that is either derived from the instance or given explicitly.
///
/// Serialized as the string `"auto"` or a number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Setting {
    Auto,
    Value(f64),
}

impl Serialize for Setting {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Setting::Auto => s.serialize_str("auto"),
            Setting::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Setting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Setting::Value(v)),
            Raw::Str(s) if s.eq_ignore_ascii_case("auto") => Ok(Setting::Auto),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected \"auto\" or a number, got {s:?}"
            ))),
        }
    }
}

/// What to do when a numeric λ₀ violates `λ₀ > ‖A‖²/σ_n²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lambda0Policy {
    /// Replace it by `1.01·‖A‖²/σ_n²` and record a warning.
    Raise,
    /// Fail the solve.
    Reject,
}

/// When the residual test declares convergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// Primal and dual residual both at most `tol`.
    Both,
    /// Either residual at most `tol`.
    Either,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub cmn: CmnParams,
    /// Augmented-Lagrangian penalty σ.
    pub sigma: f64,
    /// Initial sparsity weight; `Auto` uses `xi·‖Aᵀy‖∞/σ_n²`.
    pub mu_init: Setting,
    pub xi: f64,
    pub mu_min: f64,
    /// Continuation factor, `μ ← max(ζμ, μ_min)`.
    pub zeta: f64,
    /// ISTA constant; `Auto` uses `1.01·‖A‖²/σ_n²`.
    pub lambda0: Setting,
    pub lambda0_policy: Lambda0Policy,
    pub tol: f64,
    pub max_iter: usize,
    pub stop_rule: StopRule,
    /// Majorize-minimize steps per block and ADMM iteration.
    pub inner_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cmn: CmnParams {
                p_s: 0.0,
                p_f: 1.0,
                q: 1.0,
                eps: 1e-2,
            },
            sigma: 1.0,
            mu_init: Setting::Auto,
            xi: 0.1,
            mu_min: 0.5,
            zeta: 0.95,
            lambda0: Setting::Value(2.0),
            lambda0_policy: Lambda0Policy::Raise,
            tol: 1e-5,
            max_iter: 100,
            stop_rule: StopRule::Both,
            inner_iters: 1,
        }
    }
}

impl SolverConfig {
    pub fn with_cmn(mut self, cmn: CmnParams) -> Self {
        self.cmn = cmn;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.cmn.validate()?;
        if self.cmn.q != 1.0 && self.cmn.q != 2.0 {
            return Err(Error::invalid(format!(
                "the solver supports q = 1 or q = 2, got {}",
                self.cmn.q
            )));
        }
        let positive = [
            ("sigma", self.sigma),
            ("xi", self.xi),
            ("mu_min", self.mu_min),
            ("tol", self.tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return Err(Error::invalid(format!("zeta must lie in (0, 1], got {}", self.zeta)));
        }
        if let Setting::Value(mu) = self.mu_init {
            if !(mu >= 0.0 && mu.is_finite()) {
                return Err(Error::invalid(format!("mu_init must be nonnegative, got {mu}")));
            }
        }
        if let Setting::Value(l) = self.lambda0 {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::invalid(format!("lambda0 must be positive, got {l}")));
            }
        }
        if self.max_iter == 0 || self.inner_iters == 0 {
            return Err(Error::invalid("max_iter and inner_iters must be at least 1"));
        }
        Ok(())
    }
}

/// ADMM iterate together with the resolved step constants.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub eta: Vec<f64>,
    pub mu: f64,
    pub lambda0: f64,
    pub k: usize,
}

impl SolverState {
    /// `η = 0`, `x = 0`, `z = −y/σ_n`, with μ and λ₀ resolved for `problem`.
    ///
    /// Returns any warnings raised while resolving λ₀.
    pub fn initial(problem: &Problem, config: &SolverConfig) -> Result<(Self, Vec<String>)> {
        problem.validate()?;
        config.validate()?;
        let mut warnings = Vec::new();
        let sn2 = problem.sigma_n * problem.sigma_n;

        let mu = match config.mu_init {
            Setting::Value(v) => v,
            Setting::Auto => config.xi * norm_inf(&problem.a.tmatvec(&problem.y)?) / sn2,
        };

        let spectral = spectral_norm_sq(&problem.a, POWER_ITERS, SPECTRAL_SEED);
        if !spectral.stabilized {
            log::debug!("power iteration did not stabilize; using margin-scaled estimate");
        }
        let bound = spectral.value / sn2;
        if !bound.is_finite() || !mu.is_finite() {
            return Err(Error::NonFinite {
                iteration: 0,
                what: if mu.is_finite() { "spectral norm" } else { "mu" },
            });
        }
        let lambda0 = match config.lambda0 {
            Setting::Auto => LAMBDA0_MARGIN * bound,
            Setting::Value(l) if l > bound => l,
            Setting::Value(l) => match config.lambda0_policy {
                Lambda0Policy::Reject => {
                    return Err(Error::invalid(format!(
                        "lambda0 = {l} violates lambda0 > ||A||^2/sigma_n^2 = {bound}"
                    )))
                }
                Lambda0Policy::Raise => {
                    let raised = LAMBDA0_MARGIN * bound;
                    let msg = format!(
                        "lambda0 = {l} does not exceed ||A||^2/sigma_n^2 = {bound:.6}; raised to {raised:.6}"
                    );
                    log::warn!("{msg}");
                    warnings.push(msg);
                    raised
                }
            },
        };
        // An all-zero matrix leaves the bound at 0; any positive λ₀ works.
        let lambda0 = if lambda0 > 0.0 { lambda0 } else { 1.0 };

        let state = Self {
            x: vec![0.0; problem.n()],
            z: problem.y.iter().map(|y| -y / problem.sigma_n).collect(),
            eta: vec![0.0; problem.m()],
            mu,
            lambda0,
            k: 0,
        };
        if state.z.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite { iteration: 0, what: "z" });
        }
        Ok((state, warnings))
    }

    fn check_dims(&self, problem: &Problem) -> Result<()> {
        Error::check_len("state x", problem.n(), self.x.len())?;
        Error::check_len("state z", problem.m(), self.z.len())?;
        Error::check_len("state eta", problem.m(), self.eta.len())
    }
}

/// `v = (Ax⁽ᵏ⁾ − y)/σ_n + η⁽ᵏ⁾/σ`, the point the z-update is pulled toward.
pub fn z_update_target(state: &SolverState, problem: &Problem, config: &SolverConfig) -> Result<Vec<f64>> {
    state.check_dims(problem)?;
    let r = problem.scaled_residual(&state.x)?;
    Ok(r.iter()
        .zip(&state.eta)
        .map(|(r, e)| r + e / config.sigma)
        .collect())
}

fn z_step_q1(v: &[f64], z_ref: &[f64], config: &SolverConfig) -> Result<Vec<f64>> {
    v.iter()
        .zip(z_ref)
        .map(|(&vi, zi)| Ok(shrink(vi, phi_weight(zi.abs(), &config.cmn)? / config.sigma)))
        .collect()
}

fn z_step_q2(v: &[f64], z_ref: &[f64], config: &SolverConfig) -> Result<Vec<f64>> {
    v.iter()
        .zip(z_ref)
        .map(|(&vi, zi)| {
            let w = phi_weight(zi.abs(), &config.cmn)?;
            debug_assert!(w >= 0.0, "negative majorizer weight");
            Ok(vi / (1.0 + 2.0 * w / config.sigma))
        })
        .collect()
}

/// z-update for `q = 1`: soft-thresholding of `v` with thresholds
/// `φ(|z⁽ᵏ⁾ᵢ| + ε)/σ`.
pub fn z_update_q1(state: &SolverState, problem: &Problem, config: &SolverConfig) -> Result<Vec<f64>> {
    if config.cmn.q != 1.0 {
        return Err(Error::invalid("z_update_q1 requires q = 1"));
    }
    let v = z_update_target(state, problem, config)?;
    z_step_q1(&v, &state.z, config)
}

/// z-update for `q = 2`: `zᵢ = vᵢ/(1 + 2Wᵢᵢ/σ)` with `Wᵢᵢ = φ(|z⁽ᵏ⁾ᵢ| + ε)`.
pub fn z_update_q2(state: &SolverState, problem: &Problem, config: &SolverConfig) -> Result<Vec<f64>> {
    if config.cmn.q != 2.0 {
        return Err(Error::invalid("z_update_q2 requires q = 2"));
    }
    let v = z_update_target(state, problem, config)?;
    z_step_q2(&v, &state.z, config)
}

/// z-update on the path selected by `config.cmn.q`, repeated
/// `config.inner_iters` times with refreshed weights.
pub fn z_update(state: &SolverState, problem: &Problem, config: &SolverConfig) -> Result<Vec<f64>> {
    let v = z_update_target(state, problem, config)?;
    let step = if config.cmn.q == 1.0 { z_step_q1 } else { z_step_q2 };
    let mut z = step(&v, &state.z, config)?;
    for _ in 1..config.inner_iters {
        z = step(&v, &z, config)?;
    }
    Ok(z)
}

/// `Σᵢ φ(|z⁽ᵏ⁾ᵢ| + ε)·|zᵢ|^q + (σ/2)‖v − z‖²`: the quantity the z-update
/// minimizes (the surrogate up to its constant ψ term).
pub fn z_subproblem_objective(
    z: &[f64],
    state: &SolverState,
    problem: &Problem,
    config: &SolverConfig,
) -> Result<f64> {
    let v = z_update_target(state, problem, config)?;
    Error::check_len("z candidate", v.len(), z.len())?;
    let mut weighted = 0.0;
    for (zi, zr) in z.iter().zip(&state.z) {
        weighted += phi_weight(zr.abs(), &config.cmn)? * zi.abs().powf(config.cmn.q);
    }
    let d = dist2(&v, z);
    Ok(weighted + 0.5 * config.sigma * d * d)
}

fn x_gradient_residual(
    x: &[f64],
    z_new: &[f64],
    eta: &[f64],
    problem: &Problem,
    config: &SolverConfig,
) -> Result<Vec<f64>> {
    Error::check_len("z_new", problem.m(), z_new.len())?;
    let r = problem.scaled_residual(x)?;
    Ok(r.iter()
        .zip(z_new)
        .zip(eta)
        .map(|((r, z), e)| r - z + e / config.sigma)
        .collect())
}

fn x_step(
    x: &[f64],
    z_new: &[f64],
    state: &SolverState,
    problem: &Problem,
    config: &SolverConfig,
) -> Result<Vec<f64>> {
    let g = x_gradient_residual(x, z_new, &state.eta, problem, config)?;
    let grad = problem.a.tmatvec(&g)?;
    let step = 1.0 / (state.lambda0 * problem.sigma_n);
    let t = state.mu / (config.sigma * state.lambda0);
    Ok(x.iter()
        .zip(&grad)
        .map(|(xi, gi)| shrink(xi - step * gi, t))
        .collect())
}

/// One ISTA step on `(σ/2)‖(Ax − y)/σ_n − z⁽ᵏ⁺¹⁾ + η⁽ᵏ⁾/σ‖² + μ‖x‖₁`
/// (repeated `config.inner_iters` times).
pub fn x_update(
    state: &SolverState,
    z_new: &[f64],
    problem: &Problem,
    config: &SolverConfig,
) -> Result<Vec<f64>> {
    state.check_dims(problem)?;
    let mut x = x_step(&state.x, z_new, state, problem, config)?;
    for _ in 1..config.inner_iters {
        x = x_step(&x, z_new, state, problem, config)?;
    }
    Ok(x)
}

/// `(σ/2)‖(Ax − y)/σ_n − z⁽ᵏ⁺¹⁾ + η⁽ᵏ⁾/σ‖² + μ‖x‖₁`
pub fn x_subproblem_objective(
    x: &[f64],
    z_new: &[f64],
    state: &SolverState,
    problem: &Problem,
    config: &SolverConfig,
) -> Result<f64> {
    let g = x_gradient_residual(x, z_new, &state.eta, problem, config)?;
    let n = norm2(&g);
    Ok(0.5 * config.sigma * n * n + state.mu * norm1(x))
}

/// `η⁽ᵏ⁺¹⁾ = η⁽ᵏ⁾ + σ((Ax⁽ᵏ⁺¹⁾ − y)/σ_n − z⁽ᵏ⁺¹⁾)`
pub fn eta_update(
    state: &SolverState,
    z_new: &[f64],
    x_new: &[f64],
    problem: &Problem,
    config: &SolverConfig,
) -> Result<Vec<f64>> {
    Error::check_len("z_new", problem.m(), z_new.len())?;
    let r = problem.scaled_residual(x_new)?;
    Ok(state
        .eta
        .iter()
        .zip(r.iter().zip(z_new))
        .map(|(e, (r, z))| e + config.sigma * (r - z))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
}

/// Primal `‖(Ax⁽ᵏ⁺¹⁾ − y)/σ_n − z⁽ᵏ⁺¹⁾‖₂` and dual `(σ/σ_n)‖Aᵀ(z⁽ᵏ⁺¹⁾ − z⁽ᵏ⁾)‖₂`.
pub fn residuals(
    prev: &SolverState,
    next: &SolverState,
    problem: &Problem,
    config: &SolverConfig,
) -> Result<Residuals> {
    let r = problem.scaled_residual(&next.x)?;
    let primal = dist2(&r, &next.z);
    Error::check_len("previous z", next.z.len(), prev.z.len())?;
    let dz: Vec<f64> = next.z.iter().zip(&prev.z).map(|(a, b)| a - b).collect();
    let dual = config.sigma / problem.sigma_n * norm2(&problem.a.tmatvec(&dz)?);
    Ok(Residuals { primal, dual })
}

/// Diagnostics for one completed iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub primal: f64,
    pub dual: f64,
    /// `ℓ_ε((Ax − y)/σ_n) + μ‖x‖₁` at the new iterate, with the μ of this step.
    pub objective: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub x_hat: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<IterationRecord>,
    /// λ₀ actually used, after validation.
    pub lambda0: f64,
    pub warnings: Vec<String>,
}

/// Step-by-step driver for the CMN-ALM iteration.
#[derive(Debug, Clone)]
pub struct CmnAlm<'a> {
    problem: &'a Problem,
    config: SolverConfig,
    state: SolverState,
    warnings: Vec<String>,
    history: Vec<IterationRecord>,
    converged: bool,
}

impl<'a> CmnAlm<'a> {
    pub fn new(problem: &'a Problem, config: &SolverConfig) -> Result<Self> {
        let (state, warnings) = SolverState::initial(problem, config)?;
        Ok(Self {
            problem,
            config: config.clone(),
            state,
            warnings,
            history: Vec::new(),
            converged: false,
        })
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn problem(&self) -> &Problem {
        self.problem
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn history(&self) -> &[IterationRecord] {
        &self.history
    }

    /// Runs one full iteration and returns its diagnostics.
    pub fn step(&mut self) -> Result<IterationRecord> {
        let (problem, config) = (self.problem, &self.config);
        let prev = &self.state;
        let iteration = prev.k + 1;

        let z = z_update(prev, problem, config)?;
        ensure_finite(&z, iteration, "z")?;
        let x = x_update(prev, &z, problem, config)?;
        ensure_finite(&x, iteration, "x")?;
        let eta = eta_update(prev, &z, &x, problem, config)?;
        ensure_finite(&eta, iteration, "eta")?;

        let next = SolverState {
            x,
            z,
            eta,
            mu: (config.zeta * prev.mu).max(config.mu_min),
            lambda0: prev.lambda0,
            k: iteration,
        };
        let res = residuals(prev, &next, problem, config)?;
        let objective =
            cmn_value(&problem.scaled_residual(&next.x)?, &config.cmn) + prev.mu * norm1(&next.x);
        if !objective.is_finite() {
            return Err(Error::NonFinite {
                iteration,
                what: "objective",
            });
        }
        let record = IterationRecord {
            iter: iteration,
            primal: res.primal,
            dual: res.dual,
            objective,
            mu: prev.mu,
        };
        self.converged = match config.stop_rule {
            StopRule::Both => res.primal <= config.tol && res.dual <= config.tol,
            StopRule::Either => res.primal <= config.tol || res.dual <= config.tol,
        };
        self.state = next;
        self.history.push(record);
        Ok(record)
    }

    /// Iterates until the stopping rule fires or `max_iter` is reached.
    pub fn run(mut self) -> Result<SolveReport> {
        while !self.converged && self.state.k < self.config.max_iter {
            self.step()?;
        }
        Ok(SolveReport {
            iterations: self.state.k,
            converged: self.converged,
            x_hat: self.state.x,
            history: self.history,
            lambda0: self.state.lambda0,
            warnings: self.warnings,
        })
    }
}

fn ensure_finite(v: &[f64], iteration: usize, what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { iteration, what })
    }
}

/// Runs CMN-ALM to convergence or `max_iter`.
pub fn solve_cmn_alm(problem: &Problem, config: &SolverConfig) -> Result<SolveReport> {
    CmnAlm::new(problem, config)?.run()
}

/// Surrogate exponent used by the single-norm baseline: 1 for `p ≤ 1`, else 2.
pub fn lp_surrogate_exponent(p: f64) -> f64 {
    if p <= 1.0 {
        1.0
    } else {
        2.0
    }
}

/// Configuration of the ℓp–ℓ1 baseline: `config` with the norm range
/// collapsed to `p_s = p_f = p`.
pub fn lp_config(p: f64, config: &SolverConfig) -> Result<SolverConfig> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(Error::invalid(format!("p must lie in (0, 2], got {p}")));
    }
    let cmn = CmnParams::single_norm(p, lp_surrogate_exponent(p), config.cmn.eps)?;
    Ok(config.clone().with_cmn(cmn))
}

/// ℓp–ℓ1 baseline, i.e. [`solve_cmn_alm`] on the degenerate range `[p, p]`.
pub fn solve_lp_admm(problem: &Problem, p: f64, config: &SolverConfig) -> Result<SolveReport> {
    solve_cmn_alm(problem, &lp_config(p, config)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::phi_weight_oracle;

    fn tiny_problem() -> Problem {
        let a = DenseMatrix::from_rows(&[
            vec![0.5, -0.2, 0.1],
            vec![0.3, 0.4, -0.6],
        ])
        .unwrap();
        Problem::new(a, vec![0.7, -0.4], 1.0).unwrap()
    }

    fn state_for(problem: &Problem, x: Vec<f64>, z: Vec<f64>, eta: Vec<f64>, mu: f64) -> SolverState {
        let s = SolverState {
            x,
            z,
            eta,
            mu,
            lambda0: 2.0,
            k: 0,
        };
        s.check_dims(problem).unwrap();
        s
    }

    #[test]
    fn setting_serde() {
        let s: Setting = serde_json::from_str("\"auto\"").unwrap();
        assert_eq!(s, Setting::Auto);
        let s: Setting = serde_json::from_str("2.5").unwrap();
        assert_eq!(s, Setting::Value(2.5));
        assert!(serde_json::from_str::<Setting>("\"fast\"").is_err());
        assert_eq!(serde_json::to_string(&Setting::Auto).unwrap(), "\"auto\"");
    }

    #[test]
    fn config_defaults_and_validation() {
        let c = SolverConfig::default();
        c.validate().unwrap();
        let parsed: SolverConfig = serde_json::from_str(r#"{"sigma": 2.0, "lambda0": "auto"}"#).unwrap();
        assert_eq!(parsed.sigma, 2.0);
        assert_eq!(parsed.lambda0, Setting::Auto);
        assert_eq!(parsed.mu_min, 0.5);

        let mut bad = SolverConfig::default();
        bad.zeta = 1.5;
        assert!(bad.validate().is_err());
        let mut bad = SolverConfig::default();
        bad.cmn = CmnParams::new(0.0, 1.0, 1.5, 0.01).unwrap();
        assert!(bad.validate().is_err());
        assert!(serde_json::from_str::<SolverConfig>(r#"{"sigmaa": 2.0}"#).is_err());
    }

    #[test]
    fn initial_state() {
        let p = tiny_problem();
        let (s, w) = SolverState::initial(&p, &SolverConfig::default()).unwrap();
        assert_eq!(s.x, vec![0.0; 3]);
        assert_eq!(s.z, vec![-0.7, 0.4]);
        assert_eq!(s.eta, vec![0.0; 2]);
        assert_eq!(s.lambda0, 2.0);
        assert!(w.is_empty());
        let aty = p.a.tmatvec(&p.y).unwrap();
        assert!((s.mu - 0.1 * norm_inf(&aty)).abs() < 1e-15);
    }

    #[test]
    fn lambda0_policies() {
        let a = DenseMatrix::diagonal(&[3.0, 1.0]).unwrap();
        let p = Problem::new(a, vec![1.0, 1.0], 1.0).unwrap();
        let (s, w) = SolverState::initial(&p, &SolverConfig::default()).unwrap();
        assert!((s.lambda0 - 1.01 * 9.0).abs() < 1e-9);
        assert_eq!(w.len(), 1);

        let mut cfg = SolverConfig::default();
        cfg.lambda0_policy = Lambda0Policy::Reject;
        assert!(SolverState::initial(&p, &cfg).is_err());
        cfg.lambda0 = Setting::Value(10.0);
        assert_eq!(SolverState::initial(&p, &cfg).unwrap().0.lambda0, 10.0);
        cfg.lambda0 = Setting::Auto;
        let (s, _) = SolverState::initial(&p, &cfg).unwrap();
        assert!((s.lambda0 - 1.01 * 9.0).abs() < 1e-9);
    }

    #[test]
    fn z_update_q1_with_zero_threshold_is_identity() {
        // φ ≡ 1 for p = q = 1; a huge σ makes the threshold negligible.
        let p = tiny_problem();
        let mut cfg = SolverConfig::default().with_cmn(CmnParams::new(1.0, 1.0, 1.0, 0.0).unwrap());
        cfg.sigma = 1e300;
        let s = state_for(&p, vec![0.1, 0.0, -0.2], vec![0.3, 0.3], vec![0.0, 0.0], 0.5);
        let v = z_update_target(&s, &p, &cfg).unwrap();
        let z = z_update_q1(&s, &p, &cfg).unwrap();
        for (a, b) in v.iter().zip(&z) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn z_update_q1_scalar_threshold_matches_oracle_and_grid() {
        let a = DenseMatrix::new(1, 1, vec![1.0]).unwrap();
        let p = Problem::new(a, vec![-0.8], 1.0).unwrap();
        let cmn = CmnParams::new(0.0, 1.0, 1.0, 1e-2).unwrap();
        let mut cfg = SolverConfig::default().with_cmn(cmn);
        cfg.sigma = 20.0;
        let s = state_for(&p, vec![0.0], vec![0.0], vec![0.0], 0.5);

        let thr = phi_weight_oracle(0.0, &cmn).unwrap() / cfg.sigma;
        let z = z_update_q1(&s, &p, &cfg).unwrap()[0];
        let v = 0.8;
        assert!((z - (v - thr)).abs() < 1e-9);

        let grid = (0..=2_000_000)
            .map(|i| -1.0 + i as f64 * 1e-6)
            .min_by(|x, y| {
                let f = |w: f64| thr * w.abs() + 0.5 * (w - v) * (w - v);
                f(*x).total_cmp(&f(*y))
            })
            .unwrap();
        assert!((z - grid).abs() <= 1e-6);
    }

    #[test]
    fn z_update_q2_examples() {
        let p = tiny_problem();
        // W = σ/2 halves the argument: p = q = 2 gives W = 1, so σ = 2.
        let mut cfg = SolverConfig::default().with_cmn(CmnParams::new(2.0, 2.0, 2.0, 0.0).unwrap());
        cfg.sigma = 2.0;
        let s = state_for(&p, vec![0.2, -0.1, 0.0], vec![0.4, -1.0], vec![0.1, 0.3], 0.5);
        let v = z_update_target(&s, &p, &cfg).unwrap();
        let z = z_update_q2(&s, &p, &cfg).unwrap();
        for (a, b) in v.iter().zip(&z) {
            assert!((0.5 * a - b).abs() < 1e-15);
        }
        // σ → ∞ makes the weighted term vanish
        cfg.sigma = 1e300;
        let z = z_update_q2(&s, &p, &cfg).unwrap();
        let v = z_update_target(&s, &p, &cfg).unwrap();
        for (a, b) in v.iter().zip(&z) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn z_update_q2_minimizes_scalar_quadratic() {
        let p = tiny_problem();
        let cfg = SolverConfig::default().with_cmn(CmnParams::new(0.0, 2.0, 2.0, 1e-2).unwrap());
        let s = state_for(&p, vec![0.3, 0.1, -0.4], vec![0.05, -2.0], vec![0.2, -0.1], 0.5);
        let v = z_update_target(&s, &p, &cfg).unwrap();
        let z = z_update_q2(&s, &p, &cfg).unwrap();
        for i in 0..2 {
            let w = phi_weight(s.z[i].abs(), &cfg.cmn).unwrap();
            let f = |t: f64| w * t * t + 0.5 * cfg.sigma * (v[i] - t) * (v[i] - t);
            let best = (0..=4_000_000)
                .map(|j| -2.0 + j as f64 * 1e-6)
                .min_by(|a, b| f(*a).total_cmp(&f(*b)))
                .unwrap();
            assert!((z[i] - best).abs() <= 1e-6);
        }
    }

    #[test]
    fn z_update_path_checks() {
        let p = tiny_problem();
        let s = SolverState::initial(&p, &SolverConfig::default()).unwrap().0;
        let cfg2 = SolverConfig::default().with_cmn(CmnParams::new(0.0, 2.0, 2.0, 1e-2).unwrap());
        assert!(z_update_q1(&s, &p, &cfg2).is_err());
        assert!(z_update_q2(&s, &p, &SolverConfig::default()).is_err());
    }

    #[test]
    fn x_update_fixed_point() {
        // residual term zero and μ = 0 leaves x unchanged
        let p = tiny_problem();
        let cfg = SolverConfig::default();
        let x = vec![0.4, -0.3, 0.2];
        let z_new = p.scaled_residual(&x).unwrap();
        let s = state_for(&p, x.clone(), z_new.clone(), vec![0.0, 0.0], 0.0);
        assert_eq!(x_update(&s, &z_new, &p, &cfg).unwrap(), x);
    }

    #[test]
    fn x_update_identity_operator_by_hand() {
        // A = I, σ_n = 1, x = 0, z_new = −y + η/σ + δ with δ = (−0.3, 0.6)
        let a = DenseMatrix::identity(2).unwrap();
        let y = vec![1.0, -2.0];
        let p = Problem::new(a, y.clone(), 1.0).unwrap();
        let mut cfg = SolverConfig::default();
        cfg.sigma = 1.0;
        let eta = vec![0.5, 0.25];
        let z_new = vec![-y[0] + eta[0] - 0.3, -y[1] + eta[1] + 0.6];
        let s = SolverState {
            x: vec![0.0, 0.0],
            z: vec![0.0, 0.0],
            eta: eta.clone(),
            mu: 0.2,
            lambda0: 2.0,
            k: 0,
        };
        // g = −y − z_new + η/σ = −δ; x⁺ = S_{μ/(σλ₀)}(−g/λ₀)
        let expected = [shrink(-0.3 / 2.0, 0.1), shrink(0.6 / 2.0, 0.1)];
        let got = x_update(&s, &z_new, &p, &cfg).unwrap();
        assert!((got[0] - expected[0]).abs() < 1e-15);
        assert!((got[1] - expected[1]).abs() < 1e-15);
        assert!((expected[0] + 0.05).abs() < 1e-15 && (expected[1] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn eta_update_examples() {
        let p = tiny_problem();
        let x = vec![0.4, -0.3, 0.2];
        let z = p.scaled_residual(&x).unwrap();
        let s = state_for(&p, x.clone(), z.clone(), vec![0.3, -0.1], 0.5);
        let cfg = SolverConfig::default();
        assert_eq!(eta_update(&s, &z, &x, &p, &cfg).unwrap(), vec![0.3, -0.1]);

        let z2 = vec![0.0, 1.0];
        let got = eta_update(&s, &z2, &x, &p, &cfg).unwrap();
        let ax = [0.5 * 0.4 + 0.2 * 0.3 + 0.1 * 0.2, 0.3 * 0.4 - 0.4 * 0.3 - 0.6 * 0.2];
        let want = [0.3 + (ax[0] - 0.7 - 0.0), -0.1 + (ax[1] + 0.4 - 1.0)];
        assert!((got[0] - want[0]).abs() < 1e-15);
        assert!((got[1] - want[1]).abs() < 1e-15);
    }

    #[test]
    fn residuals_zero_at_feasible_stationary_point() {
        let p = tiny_problem();
        let x = vec![0.4, -0.3, 0.2];
        let z = p.scaled_residual(&x).unwrap();
        let s = state_for(&p, x, z, vec![0.0, 0.0], 0.5);
        let r = residuals(&s, &s, &p, &SolverConfig::default()).unwrap();
        assert_eq!(r, Residuals { primal: 0.0, dual: 0.0 });
    }

    #[test]
    fn zero_observation_converges_immediately() {
        let p = Problem::new(tiny_problem().a, vec![0.0, 0.0], 1.0).unwrap();
        let r = solve_cmn_alm(&p, &SolverConfig::default()).unwrap();
        assert!(r.converged);
        assert!(r.iterations <= 3);
        assert!(r.x_hat.iter().all(|v| v.abs() <= 1e-5));
        assert_eq!(r.history.len(), r.iterations);
    }

    #[test]
    fn lp_config_maps_exponents() {
        let c = SolverConfig::default();
        let l = lp_config(0.5, &c).unwrap();
        assert_eq!((l.cmn.p_s, l.cmn.p_f, l.cmn.q), (0.5, 0.5, 1.0));
        let l = lp_config(1.5, &c).unwrap();
        assert_eq!((l.cmn.p_s, l.cmn.p_f, l.cmn.q), (1.5, 1.5, 2.0));
        assert!(lp_config(0.0, &c).is_err());
        assert!(lp_config(2.5, &c).is_err());
        // p = 2 has a unit weight everywhere, so its z-update is a pure rescaling
        let l = lp_config(2.0, &c).unwrap();
        for z in [1e-3, 0.4, 9.0] {
            assert_eq!(phi_weight(z, &l.cmn).unwrap(), 1.0);
        }
        let l = lp_config(1.0, &c).unwrap();
        assert_eq!(phi_weight(0.37, &l.cmn).unwrap(), 1.0);
    }
}
